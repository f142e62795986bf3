#include <Eigen/SVD>
#include <algorithm>
#include <limits>
#include <stdexcept>

#include "algo_detail.hpp"

namespace clubench::detail {

namespace {

struct Subspace {
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd basis;  // m x d_eff orthonormal columns; may be empty
};

double residual_sq(const Eigen::RowVectorXd& x, const Subspace& s) {
  Eigen::RowVectorXd centered = x - s.mean;
  double total = centered.squaredNorm();
  if (s.basis.cols() == 0) return total;
  double captured = (centered * s.basis).squaredNorm();
  return std::max(0.0, total - captured);
}

Subspace fit_subspace(const Eigen::MatrixXd& X, const std::vector<int>& members, int dim) {
  Subspace s;
  s.mean = Eigen::RowVectorXd::Zero(X.cols());
  for (int i : members) s.mean += X.row(i);
  s.mean /= static_cast<double>(members.size());

  const int usable = std::min<int>({dim, static_cast<int>(X.cols()),
                                    static_cast<int>(members.size()) - 1});
  if (usable < 1) {
    s.basis.resize(X.cols(), 0);
    return s;
  }
  Eigen::MatrixXd block(members.size(), X.cols());
  for (std::size_t r = 0; r < members.size(); ++r) block.row(static_cast<int>(r)) = X.row(members[r]) - s.mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeThinV);
  int rank = std::min<int>(usable, static_cast<int>(svd.singularValues().size()));
  s.basis = svd.matrixV().leftCols(rank);
  return s;
}

}  // namespace

std::vector<int> k_plane(const Eigen::MatrixXd& X, int k, int subspace_dim, std::uint64_t seed,
                         std::vector<double>* residual_trace) {
  const int n = static_cast<int>(X.rows());
  if (k < 1 || k > n) throw std::invalid_argument("k_plane: k out of range");
  if (subspace_dim < 1) throw std::invalid_argument("k_plane: d must be >= 1");

  KMeansOptions opts;
  opts.k = k;
  opts.init = KMeansInit::kmeanspp;
  opts.metric = Metric::euclidean;
  opts.n_init = 10;
  opts.max_iter = 100;
  std::vector<int> labels = kmeans(X, opts, seed).labels;

  auto total_residual = [&X, n](const std::vector<Subspace>& subs, const std::vector<int>& lab) {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += residual_sq(X.row(i), subs[static_cast<std::size_t>(lab[static_cast<std::size_t>(i)])]);
    return t;
  };

  std::vector<Subspace> subspaces(static_cast<std::size_t>(k));
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);

    int live = 0;
    for (int c = 0; c < k; ++c) {
      if (members[static_cast<std::size_t>(c)].empty()) continue;
      subspaces[static_cast<std::size_t>(c)] = fit_subspace(X, members[static_cast<std::size_t>(c)], subspace_dim);
      ++live;
    }
    // dead clusters repel everything
    for (int c = 0; c < k; ++c) {
      if (!members[static_cast<std::size_t>(c)].empty()) continue;
      subspaces[static_cast<std::size_t>(c)].mean =
          Eigen::RowVectorXd::Constant(X.cols(), std::numeric_limits<double>::max() / 4);
      subspaces[static_cast<std::size_t>(c)].basis.resize(X.cols(), 0);
    }
    (void)live;
    if (residual_trace) residual_trace->push_back(total_residual(subspaces, labels));

    // assignment: least projection residual, ties to the lowest cluster id
    bool changed = false;
    std::vector<int> next(labels);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_r = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        double r = residual_sq(X.row(i), subspaces[static_cast<std::size_t>(c)]);
        if (r < best_r) {
          best_r = r;
          best = c;
        }
      }
      if (next[static_cast<std::size_t>(i)] != best) {
        next[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (residual_trace) {
      // residual after the pure assignment against the same subspaces
      residual_trace->push_back(total_residual(subspaces, next));
    }

    // revive empty clusters with the worst-fitting point of a donor cluster
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int v : next) sizes[static_cast<std::size_t>(v)]++;
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      int worst = -1;
      double worst_r = -1.0;
      for (int i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(next[static_cast<std::size_t>(i)])] <= 1) continue;
        double r = residual_sq(X.row(i), subspaces[static_cast<std::size_t>(next[static_cast<std::size_t>(i)])]);
        if (r > worst_r) {
          worst_r = r;
          worst = i;
        }
      }
      if (worst < 0) break;
      sizes[static_cast<std::size_t>(next[static_cast<std::size_t>(worst)])]--;
      next[static_cast<std::size_t>(worst)] = c;
      sizes[static_cast<std::size_t>(c)]++;
      changed = true;
    }

    labels = std::move(next);
    if (!changed) break;
  }
  return compress_labels(std::move(labels));
}

}  // namespace clubench::detail
