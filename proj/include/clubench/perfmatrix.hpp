#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "clubench/sweep.hpp"

namespace clubench {

enum class MetricKind { acc, nmi, ari };

std::string to_string(MetricKind m);
MetricKind metric_kind_from_string(const std::string& s);

// valid score range of a metric, used to clamp completed entries
std::pair<double, double> metric_range(MetricKind m);

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Datasets x configurations matrix of one metric. Entries are repeat means;
// cells with no observed repeat are unobserved in the mask.
struct PerformanceMatrix {
  Eigen::MatrixXd P;
  Mask observed;
  std::vector<std::string> row_names;  // dataset names
  std::vector<std::string> col_names;  // config ids
  MetricKind metric = MetricKind::acc;

  int rows() const { return static_cast<int>(P.rows()); }
  int cols() const { return static_cast<int>(P.cols()); }
};

// Rows are sorted dataset names; columns follow the built-in grid enumeration
// per algorithm (roster order), with unknown config ids appended
// lexicographically. Duplicate (dataset, config, repeat) tuples are an error.
PerformanceMatrix build_matrix(const std::vector<RunResult>& results, MetricKind metric);

void write_matrix_csv(const std::string& path, const PerformanceMatrix& pm);
PerformanceMatrix read_matrix_csv(const std::string& path, MetricKind metric);

// Cumulative contribution ratio of the top-j singular values (dense input).
double ccr(const Eigen::MatrixXd& P, int j);

// Fixed-count MCAR mask: exactly round(mr*N*H) entries hidden via a seeded
// shuffle; every row and column keeps at least one observation (up to 100
// resampling attempts).
Mask mcar_mask(const Eigen::MatrixXd& P, double mr, std::uint64_t seed);

struct Factorization {
  Eigen::MatrixXd U, V;  // N x r, H x r
  int r = 0;
  int iterations = 0;
  std::vector<double> objective_trace;  // after every half-step

  Eigen::MatrixXd reconstruct() const { return U * V.transpose(); }
};

// Rank-constrained least squares on the observed entries by alternating
// least squares with a small ridge, initialized from the rank-r SVD of the
// zero-filled matrix. The traced objective is non-increasing. The ridge
// fixpoint drifts from an exact interpolant linearly in `ridge`; 1e-9 keeps
// full-rank reproduction of a dense matrix below 1e-8 relative error.
Factorization complete(const Eigen::MatrixXd& P, const Mask& observed, int r = 60,
                       int max_iters = 200, double tol = 1e-6, double ridge = 1e-9);

// Mean of |p_hat - p| / max(|p|, floor) over the evaluated entries.
double mape(const Eigen::MatrixXd& P_true, const Eigen::MatrixXd& P_hat, const Mask& eval_mask,
            double floor = 1e-3);

struct CompletionReport {
  double mr = 0;
  int r = 0;
  int seeds = 0;
  double mape_mean = 0, mape_std = 0;
  std::vector<double> mapes;
};

// Hides entries at rate mr, completes, clamps to the metric range, scores
// hidden entries; repeated over `seeds` mask seeds.
CompletionReport completion_experiment(const Eigen::MatrixXd& P, double mr, int r, int seeds,
                                       std::uint64_t seed0, std::pair<double, double> range,
                                       int max_iters = 200, double tol = 1e-6);

struct RankReport {
  std::vector<double> avg_rank;                      // M, 1 = best
  Eigen::MatrixXd p_values;                          // M x M paired t-tests
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> degenerate;  // zero-variance nonzero diff
};

// Per-dataset ranks (ties averaged) and two-sided paired t-tests on the
// per-dataset score differences. Identical columns get p = 1; zero-variance
// nonzero differences get p = 0 with the degenerate flag set.
RankReport ranks_and_tests(const Eigen::MatrixXd& P);

// Per-dataset best score over each algorithm's observed configs -> N x M.
Eigen::MatrixXd best_per_algorithm(const PerformanceMatrix& pm,
                                   std::vector<std::string>& algorithms_out);

struct PerformanceViews {
  Eigen::MatrixXd algorithm_view;  // M x 3N, columns [acc | nmi | ari]
  Eigen::MatrixXd dataset_view;    // N x 3M, columns [acc | nmi | ari]
};

PerformanceViews performance_vectors(const Eigen::MatrixXd& P_acc, const Eigen::MatrixXd& P_nmi,
                                     const Eigen::MatrixXd& P_ari);

}  // namespace clubench
