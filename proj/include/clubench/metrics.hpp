#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace clubench {

// Cross-tabulation of two labelings. Rows index y_true classes, columns
// index y_pred clusters; ids need not be contiguous in the inputs.
struct Contingency {
  Eigen::MatrixXd table;  // counts, K_true x K_pred
  int n = 0;
};

Contingency contingency(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Clustering accuracy: best fraction of correctly matched samples over
// injective cluster-to-class mappings, solved by optimal assignment on the
// zero-padded contingency table. Predicted cluster count may differ from the
// true one; unmatched clusters contribute nothing.
double clustering_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Normalized mutual information with the arithmetic-mean normalizer
// (H(U)+H(V))/2 and natural-log entropies. A one-cluster partition on either
// side yields 0.
double nmi(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Adjusted Rand index via pair-counting sums over the contingency table.
// A degenerate denominator (both partitions trivial) yields 1.
double ari(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Minimum-cost assignment on a square cost matrix; returns col index per row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

struct InternalMetrics {
  double sc_mean = 0, sc_std = 0, sc_min = 0, sc_max = 0;
  double chi = 0;
  double dbi = 0;
  double sse_total = 0, sse_mean = 0, sse_std = 0, sse_max = 0, sse_min = 0;
  double sse_explained_ratio = 0, sse_unexplained_ratio = 0;

  // fixed export order used by the meta-feature landmarker block
  std::vector<double> as_vector() const;
  static const std::vector<std::string>& names();
};

// Euclidean silhouette statistics, Calinski-Harabasz, Davies-Bouldin and
// per-cluster SSE aggregates for a hard partition. Requires n >= 3 and at
// least two clusters; an all-singleton partition is rejected (silhouette is
// undefined there). Singleton clusters inside a larger partition score 0.
InternalMetrics internal_metrics(const Eigen::MatrixXd& X, const std::vector<int>& labels);

}  // namespace clubench
