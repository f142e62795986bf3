#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "algo_detail.hpp"

namespace clubench::detail {

Eigen::MatrixXd knn_affinity(const Eigen::MatrixXd& X, int neighbors) {
  const int n = static_cast<int>(X.rows());
  const int k = std::min(neighbors, n - 1);
  if (k < 1) throw std::invalid_argument("knn affinity needs at least 2 samples");
  Eigen::MatrixXd D = pairwise_distance(X, Metric::euclidean);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), 0);
    // ties resolved by index so the graph is reproducible
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (D(i, a) != D(i, b)) return D(i, a) < D(i, b);
      return a < b;
    });
    int taken = 0;
    for (int j : order) {
      if (j == i) continue;
      W(i, j) = 1.0;
      if (++taken == k) break;
    }
  }
  // symmetrize by union
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double w = std::max(W(i, j), W(j, i));
      W(i, j) = w;
      W(j, i) = w;
    }
  return W;
}

Eigen::MatrixXd rbf_affinity(const Eigen::MatrixXd& X, double gamma_eff) {
  Eigen::MatrixXd D = pairwise_distance(X, Metric::euclidean);
  Eigen::MatrixXd W = (-gamma_eff * D.array().square()).exp();
  W.diagonal().setZero();
  return W;
}

std::vector<int> spectral_from_affinity(const Eigen::MatrixXd& affinity, int k,
                                        std::uint64_t seed) {
  const int n = static_cast<int>(affinity.rows());
  if (k < 1 || k > n) throw std::invalid_argument("spectral: k out of range");

  Eigen::VectorXd degree = affinity.rowwise().sum();
  for (int i = 0; i < n; ++i) {
    if (degree(i) <= 1e-12)
      throw ClusteringFailure("spectral: degenerate geometry (isolated vertex)");
  }
  Eigen::VectorXd dinv_sqrt = degree.array().rsqrt();

  // normalized affinity D^{-1/2} W D^{-1/2}; its top-k eigenvectors span the
  // same space as the bottom eigenvectors of the normalized Laplacian
  Eigen::MatrixXd M = dinv_sqrt.asDiagonal() * affinity * dinv_sqrt.asDiagonal();
  M = 0.5 * (M + M.transpose());  // enforce exact symmetry

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M);
  if (solver.info() != Eigen::Success)
    throw ClusteringFailure("spectral: eigendecomposition failed");

  Eigen::MatrixXd embedding = solver.eigenvectors().rightCols(k);
  for (int i = 0; i < n; ++i) {
    double norm = embedding.row(i).norm();
    if (norm > 1e-300) embedding.row(i) /= norm;
  }

  KMeansOptions opts;
  opts.k = k;
  opts.init = KMeansInit::kmeanspp;
  opts.metric = Metric::euclidean;
  opts.n_init = 10;
  opts.max_iter = 500;
  return kmeans(embedding, opts, seed).labels;
}

}  // namespace clubench::detail
