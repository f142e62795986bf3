#pragma once

// Internal surface shared by the per-algorithm translation units. Exposed
// (headers under src/) so tests can drive single steps and invariants.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "clubench/algorithms.hpp"
#include "clubench/distance.hpp"
#include "clubench/rng.hpp"

namespace clubench::detail {

// Relabels to contiguous 0..C-1 by first occurrence.
std::vector<int> compress_labels(std::vector<int> labels);

// Lloyd iterations from explicit initial centers. Appends the objective after
// every update step when obj_trace is given.
KMeansResult lloyd(const Eigen::MatrixXd& X, Eigen::MatrixXd centers, Metric metric,
                   int max_iter, std::vector<double>* obj_trace = nullptr);

// D^2-weighted center choice (kmeans++) under the given metric.
Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& X, int k, Metric metric, Rng& rng);

// Kernel k-means on a precomputed PSD kernel matrix from an initial hard
// assignment; empty clusters are repaired deterministically.
std::vector<int> kernel_kmeans_run(const Eigen::MatrixXd& kernel, int k,
                                   std::vector<int> init_labels, int max_iter,
                                   std::vector<double>* obj_trace = nullptr);

std::vector<int> kernel_kmeans(const Eigen::MatrixXd& X, int k, double gamma_eff,
                               KMeansInit init, int max_iter, std::uint64_t seed);

enum class Linkage { average, complete, single };
Linkage linkage_from_string(const std::string& s);

struct MergeStep {
  int a, b;        // cluster ids being merged (ids >= n are prior merges)
  double height;   // linkage distance
};

// Nearest-neighbor-chain agglomeration over a precomputed distance matrix.
std::vector<MergeStep> agglomerate(Eigen::MatrixXd dist, Linkage linkage);

// Cuts a merge list at k clusters (smallest-height merges first).
std::vector<int> cut_merges(const std::vector<MergeStep>& merges, int n, int k);

std::vector<int> agglomerative(const Eigen::MatrixXd& X, Metric metric, Linkage linkage, int k);

std::vector<int> dbscan(const Eigen::MatrixXd& X, double eps_abs, int min_samples, Metric metric);

std::vector<int> birch(const Eigen::MatrixXd& X, double threshold_abs, int branching_factor,
                       int k);

enum class GmmCovariance { full, spherical };
enum class GmmInit { kmeans, kmeanspp, random };

std::vector<int> gmm(const Eigen::MatrixXd& X, int k, GmmCovariance cov, GmmInit init,
                     std::uint64_t seed, std::vector<double>* loglik_trace = nullptr);

// Symmetric non-negative affinity builders for spectral clustering.
Eigen::MatrixXd knn_affinity(const Eigen::MatrixXd& X, int neighbors);
Eigen::MatrixXd rbf_affinity(const Eigen::MatrixXd& X, double gamma_eff);

// Ng-Jordan-Weiss embedding + kmeans on a given affinity.
std::vector<int> spectral_from_affinity(const Eigen::MatrixXd& affinity, int k,
                                        std::uint64_t seed);

std::vector<int> mean_shift(const Eigen::MatrixXd& X, double bandwidth_abs, int min_bin_freq);

// Alternating subspace fit/assign. residual_trace, when given, receives the
// total projection residual after every refit and after every assignment.
std::vector<int> k_plane(const Eigen::MatrixXd& X, int k, int subspace_dim, std::uint64_t seed,
                         std::vector<double>* residual_trace = nullptr);

// Self-expressive coefficients, one column per sample, zero diagonal.
Eigen::MatrixXd ssc_coefficients(const Eigen::MatrixXd& X, double lambda, int admm_iters = 200,
                                 double tol = 1e-4);

std::vector<int> ssc(const Eigen::MatrixXd& X, int k, double lambda, std::uint64_t seed);

}  // namespace clubench::detail
