#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clubench/distance.hpp"

namespace clubench {

enum class Algorithm {
  KMeans,
  KernelKMeans,
  AggClu,
  DBSCAN,
  BIRCH,
  GMM,
  SpeClu,
  MeanShift,
  kPC,
  SSC,
};

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);
const std::vector<Algorithm>& algorithm_roster();
bool takes_k(Algorithm a);

// One bound hyperparameter value, kept as canonical text so config ids and
// grid files round-trip exactly.
struct ParamValue {
  std::string text;

  static ParamValue str(std::string s) { return {std::move(s)}; }
  static ParamValue integer(long v) { return {std::to_string(v)}; }
  static ParamValue real(double v);

  double as_double() const;
  int as_int() const;
};

// One fully bound grid cell: algorithm plus hyperparameters (Table-style
// names), plus the cluster count K bound per dataset at run time. DBSCAN and
// MeanShift do not take K.
struct AlgorithmConfig {
  Algorithm algorithm = Algorithm::KMeans;
  std::vector<std::pair<std::string, ParamValue>> params;  // in grid row order
  std::optional<int> k;

  const ParamValue* find(const std::string& name) const;
  const ParamValue& at(const std::string& name) const;
  bool has(const std::string& name) const { return find(name) != nullptr; }
  void set(const std::string& name, ParamValue v);
};

// "<algo>/<name=value;...>" with parameters in grid row order; excludes K so
// the id is stable across datasets.
std::string config_id(const AlgorithmConfig& cfg);
AlgorithmConfig config_from_id(const std::string& id);
std::string algorithm_of_config_id(const std::string& id);

// Data-driven scale factors: eps_base is the mean pairwise distance under the
// given metric, gamma_base = 1 / (2 * median squared euclidean distance).
// Computed exactly when n <= sample_cap, else on a seeded uniform subsample.
struct ScaleBases {
  double eps_base = 0.0;
  double gamma_base = 0.0;
};

ScaleBases scale_bases(const Eigen::MatrixXd& X, Metric metric, int sample_cap = 2000,
                       std::uint64_t seed = 0);

// A run that failed numerically (non-converged eigensolve, degenerate
// geometry, singular covariance). The sweep records such cells as missing.
class ClusteringFailure : public std::runtime_error {
 public:
  explicit ClusteringFailure(const std::string& what) : std::runtime_error(what) {}
};

// Runs one configuration on a data matrix. Returns hard labels 0..C-1 with
// every cluster non-empty; deterministic in (cfg, X, seed). DBSCAN noise
// points share one dedicated trailing label. Throws std::invalid_argument on
// contract violations and ClusteringFailure on numerical failure.
std::vector<int> fit_predict(const AlgorithmConfig& cfg, const Eigen::MatrixXd& X,
                             std::uint64_t seed);

// ----- KMeans engine (also the meta-feature landmarker) -----

enum class KMeansInit { kmeanspp, random };

struct KMeansOptions {
  int k = 2;
  KMeansInit init = KMeansInit::kmeanspp;
  Metric metric = Metric::euclidean;
  int n_init = 10;
  int max_iter = 500;
};

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double objective = 0.0;
  int iterations = 0;
};

KMeansResult kmeans(const Eigen::MatrixXd& X, const KMeansOptions& opts, std::uint64_t seed);

}  // namespace clubench
