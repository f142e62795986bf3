#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "algo_detail.hpp"

namespace clubench {

namespace detail {

std::vector<int> compress_labels(std::vector<int> labels) {
  std::vector<int> remap;
  auto lookup = [&remap](int v) -> int {
    for (std::size_t i = 0; i < remap.size(); ++i)
      if (remap[i] == v) return static_cast<int>(i);
    remap.push_back(v);
    return static_cast<int>(remap.size()) - 1;
  };
  for (int& v : labels) v = lookup(v);
  return labels;
}

namespace {

double point_cost(const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& c, Metric metric) {
  // squared distance for euclidean, plain distance otherwise; this is the
  // quantity Lloyd's update provably decreases for each metric's center rule
  if (metric == Metric::euclidean) return (x - c).squaredNorm();
  return distance(x, c, metric);
}

// coordinate-wise median; even cluster sizes take the midpoint
Eigen::RowVectorXd column_median(const Eigen::MatrixXd& X, const std::vector<int>& members) {
  Eigen::RowVectorXd med(X.cols());
  std::vector<double> buf(members.size());
  for (int j = 0; j < X.cols(); ++j) {
    for (std::size_t i = 0; i < members.size(); ++i) buf[i] = X(members[i], j);
    std::sort(buf.begin(), buf.end());
    std::size_t h = buf.size() / 2;
    med(j) = (buf.size() % 2 == 1) ? buf[h] : 0.5 * (buf[h - 1] + buf[h]);
  }
  return med;
}

Eigen::RowVectorXd update_center(const Eigen::MatrixXd& X, const std::vector<int>& members,
                                 const Eigen::RowVectorXd& previous, Metric metric) {
  if (members.empty()) return previous;
  if (metric == Metric::manhattan) return column_median(X, members);
  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(X.cols());
  for (int i : members) mean += X.row(i);
  mean /= static_cast<double>(members.size());
  if (metric == Metric::cosine) {
    double norm = mean.norm();
    if (norm <= 0.0) return previous;  // degenerate antipodal cluster
    mean /= norm;
  }
  return mean;
}

}  // namespace

Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& X, int k, Metric metric, Rng& rng) {
  const int n = static_cast<int>(X.rows());
  Eigen::MatrixXd centers(k, X.cols());
  int first = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  centers.row(0) = X.row(first);
  std::vector<double> best(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) best[static_cast<std::size_t>(i)] = point_cost(X.row(i), centers.row(0), metric);
  for (int c = 1; c < k; ++c) {
    int pick = rng.weighted_index(best);
    centers.row(c) = X.row(pick);
    for (int i = 0; i < n; ++i) {
      double d = point_cost(X.row(i), centers.row(c), metric);
      if (d < best[static_cast<std::size_t>(i)]) best[static_cast<std::size_t>(i)] = d;
    }
  }
  return centers;
}

KMeansResult lloyd(const Eigen::MatrixXd& X, Eigen::MatrixXd centers, Metric metric,
                   int max_iter, std::vector<double>* obj_trace) {
  const int n = static_cast<int>(X.rows());
  const int k = static_cast<int>(centers.rows());
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  double objective = std::numeric_limits<double>::infinity();
  int iter = 0;

  for (; iter < max_iter; ++iter) {
    // assignment
    bool changed = false;
    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      int best_c = 0;
      double best_d = point_cost(X.row(i), centers.row(0), metric);
      for (int c = 1; c < k; ++c) {
        double d = point_cost(X.row(i), centers.row(c), metric);
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      obj += best_d;
      if (labels[static_cast<std::size_t>(i)] != best_c) {
        labels[static_cast<std::size_t>(i)] = best_c;
        changed = true;
      }
    }

    // empty-cluster repair: reseed to the farthest point of a donor cluster
    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);
    for (int c = 0; c < k; ++c) {
      if (!members[static_cast<std::size_t>(c)].empty()) continue;
      int worst = -1;
      double worst_d = -1.0;
      for (int i = 0; i < n; ++i) {
        int ci = labels[static_cast<std::size_t>(i)];
        if (members[static_cast<std::size_t>(ci)].size() <= 1) continue;
        double d = point_cost(X.row(i), centers.row(ci), metric);
        if (d > worst_d) {
          worst_d = d;
          worst = i;
        }
      }
      if (worst < 0) break;  // fewer distinct points than clusters
      auto& donor = members[static_cast<std::size_t>(labels[static_cast<std::size_t>(worst)])];
      donor.erase(std::find(donor.begin(), donor.end(), worst));
      labels[static_cast<std::size_t>(worst)] = c;
      members[static_cast<std::size_t>(c)].push_back(worst);
      centers.row(c) = X.row(worst);
      changed = true;
    }

    objective = obj;
    if (obj_trace) obj_trace->push_back(obj);
    if (!changed) break;

    // update
    for (int c = 0; c < k; ++c)
      centers.row(c) = update_center(X, members[static_cast<std::size_t>(c)], centers.row(c), metric);
  }

  // final objective against the final centers
  double final_obj = 0.0;
  for (int i = 0; i < n; ++i)
    final_obj += point_cost(X.row(i), centers.row(labels[static_cast<std::size_t>(i)]), metric);

  KMeansResult r;
  r.labels = std::move(labels);
  r.centers = std::move(centers);
  r.objective = final_obj;
  r.iterations = iter;
  return r;
}

}  // namespace detail

KMeansResult kmeans(const Eigen::MatrixXd& X, const KMeansOptions& opts, std::uint64_t seed) {
  const int n = static_cast<int>(X.rows());
  if (opts.k < 1 || opts.k > n) throw std::invalid_argument("kmeans: k out of range");
  Eigen::MatrixXd data = (opts.metric == Metric::cosine) ? normalize_rows(X) : X;

  Rng rng(seed);
  KMeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < std::max(1, opts.n_init); ++restart) {
    Rng sub(rng.fork(static_cast<std::uint64_t>(restart)));
    Eigen::MatrixXd centers;
    if (opts.init == KMeansInit::kmeanspp) {
      centers = detail::kmeanspp_centers(data, opts.k, opts.metric, sub);
    } else {
      std::vector<int> idx = sub.sample_without_replacement(n, opts.k);
      centers.resize(opts.k, data.cols());
      for (int c = 0; c < opts.k; ++c) centers.row(c) = data.row(idx[static_cast<std::size_t>(c)]);
    }
    KMeansResult r = detail::lloyd(data, std::move(centers), opts.metric, opts.max_iter);
    if (r.objective < best.objective) best = std::move(r);
  }

  // rename clusters by first occurrence, keeping centers aligned
  std::vector<int> renamed = detail::compress_labels(best.labels);
  int c_out = 0;
  for (int v : renamed) c_out = std::max(c_out, v + 1);
  Eigen::MatrixXd centers(c_out, best.centers.cols());
  for (std::size_t i = 0; i < renamed.size(); ++i)
    centers.row(renamed[i]) = best.centers.row(best.labels[i]);
  best.labels = std::move(renamed);
  best.centers = std::move(centers);
  return best;
}

}  // namespace clubench
