#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "algo_detail.hpp"

namespace clubench::detail {

namespace {

struct Mode {
  Eigen::RowVectorXd point;
  int support = 0;
};

}  // namespace

std::vector<int> mean_shift(const Eigen::MatrixXd& X, double bandwidth_abs, int min_bin_freq) {
  const int n = static_cast<int>(X.rows());
  const int m = static_cast<int>(X.cols());
  if (bandwidth_abs <= 0.0) throw std::invalid_argument("mean_shift: bandwidth must be positive");

  // binned seeding: one seed per occupied grid cell with enough points
  std::map<std::vector<long long>, int> bins;
  for (int i = 0; i < n; ++i) {
    std::vector<long long> key(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
      key[static_cast<std::size_t>(j)] = static_cast<long long>(std::llround(X(i, j) / bandwidth_abs));
    bins[key] += 1;
  }
  std::vector<Eigen::RowVectorXd> seeds;
  for (const auto& [key, count] : bins) {
    if (count < min_bin_freq) continue;
    Eigen::RowVectorXd s(m);
    for (int j = 0; j < m; ++j) s(j) = static_cast<double>(key[static_cast<std::size_t>(j)]) * bandwidth_abs;
    seeds.push_back(s);
  }
  if (seeds.empty()) {
    // sparse data: every point seeds itself
    seeds.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) seeds.push_back(X.row(i));
  }

  // flat-kernel ascent
  const double bw2 = bandwidth_abs * bandwidth_abs;
  const double stop = bandwidth_abs * 1e-3;
  std::vector<Mode> modes;
  for (auto& seed : seeds) {
    Eigen::RowVectorXd y = seed;
    int support = 0;
    for (int iter = 0; iter < 300; ++iter) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(m);
      support = 0;
      for (int i = 0; i < n; ++i) {
        if ((X.row(i) - y).squaredNorm() <= bw2) {
          mean += X.row(i);
          ++support;
        }
      }
      if (support == 0) break;
      mean /= support;
      double shift = (mean - y).norm();
      y = mean;
      if (shift < stop) break;
    }
    if (support > 0) modes.push_back({y, support});
  }
  if (modes.empty()) throw ClusteringFailure("mean_shift: no mode attracted any point");

  // merge modes closer than bandwidth/2, strongest support first
  std::vector<int> order(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&modes](int a, int b) {
    if (modes[static_cast<std::size_t>(a)].support != modes[static_cast<std::size_t>(b)].support)
      return modes[static_cast<std::size_t>(a)].support > modes[static_cast<std::size_t>(b)].support;
    // deterministic tie-break on coordinates, then index
    const auto& pa = modes[static_cast<std::size_t>(a)].point;
    const auto& pb = modes[static_cast<std::size_t>(b)].point;
    for (int j = 0; j < pa.size(); ++j)
      if (pa(j) != pb(j)) return pa(j) < pb(j);
    return a < b;
  });
  const double merge2 = 0.25 * bw2;
  std::vector<Eigen::RowVectorXd> kept;
  for (int idx : order) {
    const auto& cand = modes[static_cast<std::size_t>(idx)].point;
    bool merged = false;
    for (const auto& kept_mode : kept) {
      if ((cand - kept_mode).squaredNorm() <= merge2) {
        merged = true;
        break;
      }
    }
    if (!merged) kept.push_back(cand);
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < kept.size(); ++c) {
      double d = (X.row(i) - kept[c]).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return compress_labels(std::move(labels));
}

}  // namespace clubench::detail
