#include <queue>
#include <stdexcept>
#include <vector>

#include "algo_detail.hpp"

namespace clubench::detail {

std::vector<int> dbscan(const Eigen::MatrixXd& X, double eps_abs, int min_samples,
                        Metric metric) {
  const int n = static_cast<int>(X.rows());
  if (eps_abs <= 0.0) throw std::invalid_argument("dbscan: eps must be positive");
  if (min_samples < 1) throw std::invalid_argument("dbscan: min_sample must be >= 1");

  Eigen::MatrixXd data = (metric == Metric::cosine) ? normalize_rows(X) : X;

  // neighbor lists row by row; a point counts itself
  std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& ni = neighbors[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      if (distance(data.row(i), data.row(j), metric) <= eps_abs) ni.push_back(j);
    }
  }

  constexpr int kUnvisited = -2;
  constexpr int kNoise = -1;
  std::vector<int> labels(static_cast<std::size_t>(n), kUnvisited);
  int next_cluster = 0;

  for (int i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] != kUnvisited) continue;
    if (static_cast<int>(neighbors[static_cast<std::size_t>(i)].size()) < min_samples) {
      labels[static_cast<std::size_t>(i)] = kNoise;
      continue;
    }
    const int cluster = next_cluster++;
    labels[static_cast<std::size_t>(i)] = cluster;
    std::queue<int> frontier;
    for (int j : neighbors[static_cast<std::size_t>(i)]) frontier.push(j);
    while (!frontier.empty()) {
      int p = frontier.front();
      frontier.pop();
      int& lp = labels[static_cast<std::size_t>(p)];
      if (lp == kNoise) lp = cluster;  // border point claimed by the first core reaching it
      if (lp != kUnvisited) continue;
      lp = cluster;
      if (static_cast<int>(neighbors[static_cast<std::size_t>(p)].size()) >= min_samples) {
        for (int q : neighbors[static_cast<std::size_t>(p)]) frontier.push(q);
      }
    }
  }

  // all noise points share one dedicated trailing label
  bool any_noise = false;
  for (int v : labels)
    if (v == kNoise) any_noise = true;
  if (any_noise) {
    for (int& v : labels)
      if (v == kNoise) v = next_cluster;
  }
  return labels;
}

}  // namespace clubench::detail
