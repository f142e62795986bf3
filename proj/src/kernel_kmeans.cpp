#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "algo_detail.hpp"

namespace clubench::detail {

namespace {

// squared kernel-space distance between a point and a cluster mean:
// K_ii - 2*rowsum_i/|C| + clustersum/|C|^2
struct ClusterStats {
  std::vector<int> size;
  std::vector<double> self_sum;  // sum_{j,l in C} K_jl
};

}  // namespace

std::vector<int> kernel_kmeans_run(const Eigen::MatrixXd& kernel, int k,
                                   std::vector<int> init_labels, int max_iter,
                                   std::vector<double>* obj_trace) {
  const int n = static_cast<int>(kernel.rows());
  if (static_cast<int>(init_labels.size()) != n)
    throw std::invalid_argument("kernel_kmeans: bad init assignment");

  std::vector<int> labels = std::move(init_labels);
  Eigen::MatrixXd member_sum(n, k);  // member_sum(i,c) = sum_{j in c} K_ij

  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<int> size(static_cast<std::size_t>(k), 0);
    for (int v : labels) size[static_cast<std::size_t>(v)]++;

    member_sum.setZero();
    for (int j = 0; j < n; ++j) member_sum.col(labels[static_cast<std::size_t>(j)]) += kernel.col(j);

    std::vector<double> self_sum(static_cast<std::size_t>(k), 0.0);
    for (int j = 0; j < n; ++j)
      self_sum[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] +=
          member_sum(j, labels[static_cast<std::size_t>(j)]);

    bool changed = false;
    double objective = 0.0;
    std::vector<int> next(labels);
    for (int i = 0; i < n; ++i) {
      int best_c = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        if (size[static_cast<std::size_t>(c)] == 0) continue;
        double sz = static_cast<double>(size[static_cast<std::size_t>(c)]);
        double d = kernel(i, i) - 2.0 * member_sum(i, c) / sz +
                   self_sum[static_cast<std::size_t>(c)] / (sz * sz);
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      objective += best_d;
      if (next[static_cast<std::size_t>(i)] != best_c) {
        next[static_cast<std::size_t>(i)] = best_c;
        changed = true;
      }
    }

    // repair empty clusters with the point farthest from its own centroid
    std::vector<int> nsize(static_cast<std::size_t>(k), 0);
    for (int v : next) nsize[static_cast<std::size_t>(v)]++;
    for (int c = 0; c < k; ++c) {
      if (nsize[static_cast<std::size_t>(c)] > 0) continue;
      int worst = -1;
      double worst_d = -1.0;
      for (int i = 0; i < n; ++i) {
        int ci = next[static_cast<std::size_t>(i)];
        if (nsize[static_cast<std::size_t>(ci)] <= 1) continue;
        double sz = static_cast<double>(size[static_cast<std::size_t>(ci)]);
        if (size[static_cast<std::size_t>(ci)] == 0) continue;
        double d = kernel(i, i) - 2.0 * member_sum(i, ci) / sz +
                   self_sum[static_cast<std::size_t>(ci)] / (sz * sz);
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      if (worst < 0) break;
      nsize[static_cast<std::size_t>(next[static_cast<std::size_t>(worst)])]--;
      next[static_cast<std::size_t>(worst)] = c;
      nsize[static_cast<std::size_t>(c)]++;
      changed = true;
    }

    labels = std::move(next);
    if (obj_trace) obj_trace->push_back(objective);
    if (!changed) break;
  }
  return compress_labels(std::move(labels));
}

std::vector<int> kernel_kmeans(const Eigen::MatrixXd& X, int k, double gamma_eff,
                               KMeansInit init, int max_iter, std::uint64_t seed) {
  const int n = static_cast<int>(X.rows());
  Eigen::MatrixXd D = pairwise_distance(X, Metric::euclidean);
  Eigen::MatrixXd kernel = (-gamma_eff * D.array().square()).exp();

  Rng rng(seed);
  std::vector<int> centers;
  if (init == KMeansInit::kmeanspp) {
    // D^2 seeding in kernel-induced distance d2(i,j) = K_ii + K_jj - 2 K_ij
    centers.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
    std::vector<double> best(static_cast<std::size_t>(n), 0.0);
    auto kdist2 = [&kernel](int i, int j) {
      return kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j);
    };
    for (int i = 0; i < n; ++i) best[static_cast<std::size_t>(i)] = kdist2(i, centers[0]);
    while (static_cast<int>(centers.size()) < k) {
      int pick = rng.weighted_index(best);
      centers.push_back(pick);
      for (int i = 0; i < n; ++i)
        best[static_cast<std::size_t>(i)] = std::min(best[static_cast<std::size_t>(i)], kdist2(i, pick));
    }
  } else {
    centers = rng.sample_without_replacement(n, k);
  }

  std::vector<int> init_labels(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      int j = centers[static_cast<std::size_t>(c)];
      double d = kernel(i, i) + kernel(j, j) - 2.0 * kernel(i, j);
      if (d < best_d) {
        best_d = d;
        init_labels[static_cast<std::size_t>(i)] = c;
      }
    }
  }
  return kernel_kmeans_run(kernel, k, std::move(init_labels), max_iter);
}

}  // namespace clubench::detail
