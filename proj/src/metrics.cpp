#include "clubench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace clubench {

namespace {

std::vector<int> compress_ids(const std::vector<int>& y, int& k_out) {
  std::map<int, int> remap;
  std::vector<int> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(y[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  k_out = static_cast<int>(remap.size());
  return out;
}

double entropy_nats(const Eigen::VectorXd& counts, double n) {
  double h = 0.0;
  for (int i = 0; i < counts.size(); ++i) {
    if (counts(i) > 0) {
      double p = counts(i) / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

inline double pairs2(double c) { return c * (c - 1.0) / 2.0; }

}  // namespace

Contingency contingency(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size()) throw std::invalid_argument("label length mismatch");
  if (y_true.empty()) throw std::invalid_argument("empty label vectors");
  int kt = 0, kp = 0;
  std::vector<int> a = compress_ids(y_true, kt);
  std::vector<int> b = compress_ids(y_pred, kp);
  Contingency c;
  c.n = static_cast<int>(y_true.size());
  c.table = Eigen::MatrixXd::Zero(kt, kp);
  for (std::size_t i = 0; i < a.size(); ++i) c.table(a[i], b[i]) += 1.0;
  return c;
}

std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw std::invalid_argument("assignment needs a square matrix");
  const double inf = std::numeric_limits<double>::infinity();
  // potentials method, 1-based with a virtual row/column 0
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      int i0 = p[static_cast<std::size_t>(j0)], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (p[static_cast<std::size_t>(j)] > 0) row_to_col[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
  return row_to_col;
}

double clustering_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  Contingency c = contingency(y_true, y_pred);
  const int dim = static_cast<int>(std::max(c.table.rows(), c.table.cols()));
  Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(dim, dim);
  cost.topLeftCorner(c.table.rows(), c.table.cols()) = -c.table;
  std::vector<int> match = solve_assignment(cost);
  double correct = 0.0;
  for (int i = 0; i < static_cast<int>(c.table.rows()); ++i) {
    int j = match[static_cast<std::size_t>(i)];
    if (j >= 0 && j < c.table.cols()) correct += c.table(i, j);
  }
  return correct / c.n;
}

double nmi(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  Contingency c = contingency(y_true, y_pred);
  const double n = c.n;
  Eigen::VectorXd a = c.table.rowwise().sum();
  Eigen::VectorXd b = c.table.colwise().sum();
  double hu = entropy_nats(a, n);
  double hv = entropy_nats(b, n);
  if (hu <= 0.0 || hv <= 0.0) return 0.0;
  double mi = 0.0;
  for (int i = 0; i < c.table.rows(); ++i) {
    for (int j = 0; j < c.table.cols(); ++j) {
      double nij = c.table(i, j);
      if (nij > 0) mi += (nij / n) * std::log(n * nij / (a(i) * b(j)));
    }
  }
  double v = mi / (0.5 * (hu + hv));
  return std::clamp(v, 0.0, 1.0);
}

double ari(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() < 2) throw std::invalid_argument("ari needs at least 2 samples");
  Contingency c = contingency(y_true, y_pred);
  double sum_ij = 0.0;
  for (int i = 0; i < c.table.rows(); ++i)
    for (int j = 0; j < c.table.cols(); ++j) sum_ij += pairs2(c.table(i, j));
  double sum_a = 0.0, sum_b = 0.0;
  Eigen::VectorXd a = c.table.rowwise().sum();
  Eigen::VectorXd b = c.table.colwise().sum();
  for (int i = 0; i < a.size(); ++i) sum_a += pairs2(a(i));
  for (int j = 0; j < b.size(); ++j) sum_b += pairs2(b(j));
  double total = pairs2(static_cast<double>(c.n));
  double expected = sum_a * sum_b / total;
  double max_index = 0.5 * (sum_a + sum_b);
  double denom = max_index - expected;
  if (std::abs(denom) < 1e-12) return 1.0;
  return (sum_ij - expected) / denom;
}

std::vector<double> InternalMetrics::as_vector() const {
  return {sc_mean, sc_std,  sc_min,  sc_max,  chi,     dbi,
          sse_total, sse_mean, sse_std, sse_max, sse_min,
          sse_explained_ratio, sse_unexplained_ratio};
}

const std::vector<std::string>& InternalMetrics::names() {
  static const std::vector<std::string> k = {
      "sc_mean", "sc_std", "sc_min", "sc_max", "chi", "dbi",
      "sse_total", "sse_mean", "sse_std", "sse_max", "sse_min",
      "sse_explained_ratio", "sse_unexplained_ratio"};
  return k;
}

InternalMetrics internal_metrics(const Eigen::MatrixXd& X, const std::vector<int>& labels) {
  const int n = static_cast<int>(X.rows());
  if (n < 3) throw std::invalid_argument("internal metrics need n >= 3");
  if (static_cast<int>(labels.size()) != n) throw std::invalid_argument("label length mismatch");

  int k = 0;
  std::vector<int> lab = compress_ids(labels, k);
  if (k < 2) throw std::invalid_argument("internal metrics need at least 2 clusters");
  if (k == n) throw std::invalid_argument("silhouette undefined for all-singleton clustering");

  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int v : lab) sizes[static_cast<std::size_t>(v)]++;

  // silhouette from streaming row distances (no n x n matrix)
  Eigen::VectorXd sil(n);
  {
    Eigen::VectorXd dsum(k);
    for (int i = 0; i < n; ++i) {
      dsum.setZero();
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        dsum(lab[static_cast<std::size_t>(j)]) += (X.row(i) - X.row(j)).norm();
      }
      int ci = lab[static_cast<std::size_t>(i)];
      if (sizes[static_cast<std::size_t>(ci)] <= 1) {
        sil(i) = 0.0;  // singleton convention
        continue;
      }
      double a = dsum(ci) / (sizes[static_cast<std::size_t>(ci)] - 1);
      double b = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        if (c == ci || sizes[static_cast<std::size_t>(c)] == 0) continue;
        b = std::min(b, dsum(c) / sizes[static_cast<std::size_t>(c)]);
      }
      double denom = std::max(a, b);
      sil(i) = denom > 0 ? (b - a) / denom : 0.0;
    }
  }

  InternalMetrics im;
  im.sc_mean = sil.mean();
  im.sc_std = std::sqrt((sil.array() - im.sc_mean).square().sum() / n);
  im.sc_min = sil.minCoeff();
  im.sc_max = sil.maxCoeff();

  // centroids and per-cluster dispersion
  const int m = static_cast<int>(X.cols());
  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, m);
  for (int i = 0; i < n; ++i) centroids.row(lab[static_cast<std::size_t>(i)]) += X.row(i);
  for (int c = 0; c < k; ++c) centroids.row(c) /= sizes[static_cast<std::size_t>(c)];
  Eigen::RowVectorXd grand = X.colwise().mean();

  Eigen::VectorXd sse = Eigen::VectorXd::Zero(k);       // sum of squared distances
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(k);     // mean distance to centroid
  for (int i = 0; i < n; ++i) {
    int c = lab[static_cast<std::size_t>(i)];
    double d2 = (X.row(i) - centroids.row(c)).squaredNorm();
    sse(c) += d2;
    sigma(c) += std::sqrt(d2);
  }
  for (int c = 0; c < k; ++c) sigma(c) /= sizes[static_cast<std::size_t>(c)];

  double within = sse.sum();
  double between = 0.0;
  for (int c = 0; c < k; ++c)
    between += sizes[static_cast<std::size_t>(c)] * (centroids.row(c) - grand).squaredNorm();

  im.chi = within <= 0.0 ? 1.0 : (between / (k - 1)) / (within / (n - k));

  double dbi = 0.0;
  for (int i = 0; i < k; ++i) {
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      double d = (centroids.row(i) - centroids.row(j)).norm();
      double num = sigma(i) + sigma(j);
      double ratio = (num <= 0.0) ? 0.0 : num / std::max(d, 1e-12);
      worst = std::max(worst, ratio);
    }
    dbi += worst;
  }
  im.dbi = dbi / k;

  im.sse_total = within;
  im.sse_mean = sse.mean();
  im.sse_std = std::sqrt((sse.array() - im.sse_mean).square().sum() / k);
  im.sse_max = sse.maxCoeff();
  im.sse_min = sse.minCoeff();

  double tss = (X.rowwise() - grand).squaredNorm();
  if (tss <= 0.0) {
    im.sse_explained_ratio = 1.0;
    im.sse_unexplained_ratio = 0.0;
  } else {
    im.sse_unexplained_ratio = within / tss;
    im.sse_explained_ratio = 1.0 - im.sse_unexplained_ratio;
  }
  return im;
}

}  // namespace clubench
