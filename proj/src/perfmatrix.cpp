#include "clubench/perfmatrix.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "clubench/csv.hpp"
#include "clubench/rng.hpp"

namespace clubench {

std::string to_string(MetricKind m) {
  switch (m) {
    case MetricKind::acc: return "acc";
    case MetricKind::nmi: return "nmi";
    case MetricKind::ari: return "ari";
  }
  return "acc";
}

MetricKind metric_kind_from_string(const std::string& s) {
  if (s == "acc") return MetricKind::acc;
  if (s == "nmi") return MetricKind::nmi;
  if (s == "ari") return MetricKind::ari;
  throw std::invalid_argument("unknown metric: " + s);
}

std::pair<double, double> metric_range(MetricKind m) {
  return m == MetricKind::ari ? std::pair<double, double>{-1.0, 1.0}
                              : std::pair<double, double>{0.0, 1.0};
}

PerformanceMatrix build_matrix(const std::vector<RunResult>& results, MetricKind metric) {
  if (results.empty()) throw std::invalid_argument("build_matrix: empty result list");

  std::set<std::string> dataset_set;
  std::set<std::string> config_set;
  std::set<std::tuple<std::string, std::string, int>> seen;
  for (const auto& r : results) {
    dataset_set.insert(r.dataset);
    config_set.insert(r.config_id);
    if (!seen.emplace(r.dataset, r.config_id, r.repeat).second)
      throw std::invalid_argument("duplicate (dataset, config, repeat): " + r.dataset + ", " +
                                  r.config_id + ", " + std::to_string(r.repeat));
  }

  // canonical columns: built-in grid order per roster algorithm, then any
  // remaining (override) ids lexicographically
  std::vector<std::string> cols;
  std::set<std::string> remaining = config_set;
  for (Algorithm a : algorithm_roster()) {
    Grid g = enumerate_grid(a);
    for (const auto& id : g.config_ids) {
      if (remaining.erase(id)) cols.push_back(id);
    }
  }
  for (const auto& id : remaining) cols.push_back(id);

  PerformanceMatrix pm;
  pm.metric = metric;
  pm.row_names.assign(dataset_set.begin(), dataset_set.end());
  pm.col_names = std::move(cols);

  std::map<std::string, int> row_of, col_of;
  for (std::size_t i = 0; i < pm.row_names.size(); ++i) row_of[pm.row_names[i]] = static_cast<int>(i);
  for (std::size_t j = 0; j < pm.col_names.size(); ++j) col_of[pm.col_names[j]] = static_cast<int>(j);

  const int n = static_cast<int>(pm.row_names.size());
  const int h = static_cast<int>(pm.col_names.size());
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, h);
  Eigen::MatrixXi count = Eigen::MatrixXi::Zero(n, h);
  for (const auto& r : results) {
    const std::optional<double>* v = nullptr;
    switch (metric) {
      case MetricKind::acc: v = &r.acc; break;
      case MetricKind::nmi: v = &r.nmi; break;
      case MetricKind::ari: v = &r.ari; break;
    }
    if (!*v) continue;
    int i = row_of[r.dataset], j = col_of[r.config_id];
    sum(i, j) += **v;
    count(i, j) += 1;
  }

  pm.P = Eigen::MatrixXd::Zero(n, h);
  pm.observed = Mask::Constant(n, h, false);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      if (count(i, j) > 0) {
        pm.P(i, j) = sum(i, j) / count(i, j);
        pm.observed(i, j) = true;
      }
    }
  }
  return pm;
}

void write_matrix_csv(const std::string& path, const PerformanceMatrix& pm) {
  csv::Table t;
  t.header.push_back("dataset");
  for (const auto& c : pm.col_names) t.header.push_back(c);
  for (int i = 0; i < pm.rows(); ++i) {
    std::vector<std::string> row;
    row.push_back(pm.row_names[static_cast<std::size_t>(i)]);
    for (int j = 0; j < pm.cols(); ++j)
      row.push_back(pm.observed(i, j) ? csv::format_double(pm.P(i, j)) : std::string());
    t.rows.push_back(std::move(row));
  }
  csv::write(path, t);
}

PerformanceMatrix read_matrix_csv(const std::string& path, MetricKind metric) {
  csv::Table t = csv::read(path);
  if (t.header.size() < 2 || t.header[0] != "dataset")
    throw std::runtime_error("unexpected matrix header in " + path);
  PerformanceMatrix pm;
  pm.metric = metric;
  pm.col_names.assign(t.header.begin() + 1, t.header.end());
  const int h = static_cast<int>(pm.col_names.size());
  const int n = static_cast<int>(t.rows.size());
  pm.P = Eigen::MatrixXd::Zero(n, h);
  pm.observed = Mask::Constant(n, h, false);
  for (int i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != h + 1)
      throw std::runtime_error("ragged matrix row in " + path);
    pm.row_names.push_back(row[0]);
    for (int j = 0; j < h; ++j) {
      if (auto v = csv::parse_double(row[static_cast<std::size_t>(j) + 1])) {
        pm.P(i, j) = *v;
        pm.observed(i, j) = true;
      }
    }
  }
  return pm;
}

double ccr(const Eigen::MatrixXd& P, int j) {
  const int rank_max = static_cast<int>(std::min(P.rows(), P.cols()));
  if (j < 1 || j > rank_max) throw std::invalid_argument("ccr: j out of range");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P);
  const auto& sv = svd.singularValues();
  double total = sv.sum();
  if (total <= 0.0) throw std::invalid_argument("ccr: zero matrix");
  double head = sv.head(j).sum();
  return head / total;
}

Mask mcar_mask(const Eigen::MatrixXd& P, double mr, std::uint64_t seed) {
  if (!(mr > 0.0 && mr < 1.0)) throw std::invalid_argument("mr must be in (0,1)");
  const int n = static_cast<int>(P.rows());
  const int h = static_cast<int>(P.cols());
  const long long total = static_cast<long long>(n) * h;
  const long long hidden = std::llround(mr * static_cast<double>(total));

  Rng rng(seed);
  std::vector<int> cells(static_cast<std::size_t>(total));
  for (long long i = 0; i < total; ++i) cells[static_cast<std::size_t>(i)] = static_cast<int>(i);

  for (int attempt = 0; attempt < 100; ++attempt) {
    rng.shuffle(cells);
    Mask mask = Mask::Constant(n, h, true);
    for (long long i = 0; i < hidden; ++i) {
      int cell = cells[static_cast<std::size_t>(i)];
      mask(cell / h, cell % h) = false;
    }
    bool valid = true;
    for (int i = 0; i < n && valid; ++i)
      if (!mask.row(i).any()) valid = false;
    for (int j = 0; j < h && valid; ++j)
      if (!mask.col(j).any()) valid = false;
    if (valid) return mask;
  }
  throw std::runtime_error("mcar_mask: resampling exhausted (mask keeps emptying a row/column)");
}

namespace {

double masked_objective(const Eigen::MatrixXd& P, const Mask& observed, const Eigen::MatrixXd& U,
                        const Eigen::MatrixXd& V, double ridge) {
  double obj = 0.0;
  const int n = static_cast<int>(P.rows());
  const int h = static_cast<int>(P.cols());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < h; ++j) {
      if (!observed(i, j)) continue;
      double e = U.row(i).dot(V.row(j)) - P(i, j);
      obj += e * e;
    }
  }
  obj += ridge * (U.squaredNorm() + V.squaredNorm());
  return obj;
}

// ridge-regularized least squares for each row of `out`, fitting the observed
// entries of its slice against the fixed factor
void solve_factor(const Eigen::MatrixXd& P, const Mask& observed, const Eigen::MatrixXd& fixed,
                  Eigen::MatrixXd& out, bool rows_of_p, double ridge) {
  const int r = static_cast<int>(fixed.cols());
  const int count = static_cast<int>(out.rows());
  Eigen::MatrixXd gram(r, r);
  Eigen::VectorXd rhs(r);
  for (int i = 0; i < count; ++i) {
    gram.setZero();
    rhs.setZero();
    const int other = rows_of_p ? static_cast<int>(P.cols()) : static_cast<int>(P.rows());
    for (int j = 0; j < other; ++j) {
      bool obs = rows_of_p ? observed(i, j) : observed(j, i);
      if (!obs) continue;
      double target = rows_of_p ? P(i, j) : P(j, i);
      gram.noalias() += fixed.row(j).transpose() * fixed.row(j);
      rhs.noalias() += target * fixed.row(j).transpose();
    }
    gram.diagonal().array() += ridge;
    out.row(i) = gram.ldlt().solve(rhs).transpose();
  }
}

}  // namespace

Factorization complete(const Eigen::MatrixXd& P, const Mask& observed, int r, int max_iters,
                       double tol, double ridge) {
  const int n = static_cast<int>(P.rows());
  const int h = static_cast<int>(P.cols());
  if (r < 1 || r > std::min(n, h)) throw std::invalid_argument("complete: rank out of range");
  for (int i = 0; i < n; ++i)
    if (!observed.row(i).any()) throw std::invalid_argument("complete: empty row " + std::to_string(i));
  for (int j = 0; j < h; ++j)
    if (!observed.col(j).any()) throw std::invalid_argument("complete: empty column " + std::to_string(j));

  // init from the best rank-r approximation of the zero-filled matrix
  Eigen::MatrixXd zero_filled = observed.select(P, Eigen::MatrixXd::Zero(n, h));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(zero_filled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s_half = svd.singularValues().head(r).array().sqrt();
  Factorization f;
  f.r = r;
  f.U = svd.matrixU().leftCols(r) * s_half.asDiagonal();
  f.V = svd.matrixV().leftCols(r) * s_half.asDiagonal();

  double prev = masked_objective(P, observed, f.U, f.V, ridge);
  f.objective_trace.push_back(prev);
  for (int iter = 0; iter < max_iters; ++iter) {
    solve_factor(P, observed, f.V, f.U, true, ridge);
    f.objective_trace.push_back(masked_objective(P, observed, f.U, f.V, ridge));
    solve_factor(P, observed, f.U, f.V, false, ridge);
    double obj = masked_objective(P, observed, f.U, f.V, ridge);
    f.objective_trace.push_back(obj);
    f.iterations = iter + 1;
    if (prev - obj < tol * std::max(prev, 1e-12)) break;
    prev = obj;
  }
  return f;
}

double mape(const Eigen::MatrixXd& P_true, const Eigen::MatrixXd& P_hat, const Mask& eval_mask,
            double floor) {
  if (P_true.rows() != P_hat.rows() || P_true.cols() != P_hat.cols())
    throw std::invalid_argument("mape: shape mismatch");
  double total = 0.0;
  long long count = 0;
  for (int i = 0; i < P_true.rows(); ++i) {
    for (int j = 0; j < P_true.cols(); ++j) {
      if (!eval_mask(i, j)) continue;
      total += std::abs(P_hat(i, j) - P_true(i, j)) / std::max(std::abs(P_true(i, j)), floor);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("mape: empty evaluation set");
  return total / static_cast<double>(count);
}

CompletionReport completion_experiment(const Eigen::MatrixXd& P, double mr, int r, int seeds,
                                       std::uint64_t seed0, std::pair<double, double> range,
                                       int max_iters, double tol) {
  if (seeds < 1) throw std::invalid_argument("completion_experiment: seeds must be >= 1");
  CompletionReport rep;
  rep.mr = mr;
  rep.r = r;
  rep.seeds = seeds;
  for (int s = 0; s < seeds; ++s) {
    Mask mask = mcar_mask(P, mr, seed0 + static_cast<std::uint64_t>(s));
    Factorization f = complete(P, mask, r, max_iters, tol);
    Eigen::MatrixXd recon = f.reconstruct().cwiseMax(range.first).cwiseMin(range.second);
    Mask hidden = !mask;
    rep.mapes.push_back(mape(P, recon, hidden));
  }
  double mean = 0.0;
  for (double v : rep.mapes) mean += v;
  mean /= seeds;
  double var = 0.0;
  for (double v : rep.mapes) var += (v - mean) * (v - mean);
  rep.mape_mean = mean;
  rep.mape_std = seeds > 1 ? std::sqrt(var / (seeds - 1)) : 0.0;
  return rep;
}

RankReport ranks_and_tests(const Eigen::MatrixXd& P) {
  const int n = static_cast<int>(P.rows());
  const int m = static_cast<int>(P.cols());
  if (n < 2) throw std::invalid_argument("ranks_and_tests: need at least 2 datasets");
  if (m < 2) throw std::invalid_argument("ranks_and_tests: need at least 2 algorithms");

  RankReport rep;
  rep.avg_rank.assign(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < n; ++i) {
    // descending scores; ties get the average of the positions they span
    std::vector<int> order(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) order[static_cast<std::size_t>(j)] = j;
    std::sort(order.begin(), order.end(), [&P, i](int a, int b) {
      if (P(i, a) != P(i, b)) return P(i, a) > P(i, b);
      return a < b;
    });
    int pos = 0;
    while (pos < m) {
      int end = pos;
      while (end + 1 < m &&
             P(i, order[static_cast<std::size_t>(end + 1)]) == P(i, order[static_cast<std::size_t>(pos)]))
        ++end;
      double avg = 0.5 * (pos + end) + 1.0;  // ranks are 1-based
      for (int t = pos; t <= end; ++t) rep.avg_rank[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] += avg;
      pos = end + 1;
    }
  }
  for (double& v : rep.avg_rank) v /= n;

  rep.p_values = Eigen::MatrixXd::Ones(m, m);
  rep.degenerate = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(m, m, false);
  boost::math::students_t dist(n - 1);
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      Eigen::VectorXd diff = P.col(a) - P.col(b);
      double mean = diff.mean();
      double var = (diff.array() - mean).square().sum() / (n - 1);
      double p;
      bool degen = false;
      // variance at rounding-noise level counts as zero
      if (var <= 1e-20 * std::max(mean * mean, 1e-300)) {
        if (mean == 0.0) {
          p = 1.0;  // identical columns
        } else {
          p = 0.0;  // constant nonzero difference: t statistic diverges
          degen = true;
        }
      } else {
        double t = mean / std::sqrt(var / n);
        p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
      }
      rep.p_values(a, b) = p;
      rep.p_values(b, a) = p;
      rep.degenerate(a, b) = degen;
      rep.degenerate(b, a) = degen;
    }
  }
  return rep;
}

Eigen::MatrixXd best_per_algorithm(const PerformanceMatrix& pm,
                                   std::vector<std::string>& algorithms_out) {
  std::vector<std::string> algos;
  std::map<std::string, std::vector<int>> cols_of;
  for (int j = 0; j < pm.cols(); ++j) {
    std::string a = algorithm_of_config_id(pm.col_names[static_cast<std::size_t>(j)]);
    if (!cols_of.count(a)) algos.push_back(a);
    cols_of[a].push_back(j);
  }
  const int n = pm.rows();
  const int m = static_cast<int>(algos.size());
  Eigen::MatrixXd best = Eigen::MatrixXd::Zero(n, m);
  for (int a = 0; a < m; ++a) {
    const auto& cols = cols_of[algos[static_cast<std::size_t>(a)]];
    for (int i = 0; i < n; ++i) {
      bool any = false;
      double v = 0.0;
      for (int j : cols) {
        if (!pm.observed(i, j)) continue;
        if (!any || pm.P(i, j) > v) v = pm.P(i, j);
        any = true;
      }
      best(i, a) = any ? v : 0.0;
    }
  }
  algorithms_out = std::move(algos);
  return best;
}

PerformanceViews performance_vectors(const Eigen::MatrixXd& P_acc, const Eigen::MatrixXd& P_nmi,
                                     const Eigen::MatrixXd& P_ari) {
  const int n = static_cast<int>(P_acc.rows());
  const int m = static_cast<int>(P_acc.cols());
  if (P_nmi.rows() != n || P_nmi.cols() != m || P_ari.rows() != n || P_ari.cols() != m)
    throw std::invalid_argument("performance_vectors: shape mismatch");

  PerformanceViews v;
  v.algorithm_view.resize(m, 3 * n);
  v.algorithm_view << P_acc.transpose(), P_nmi.transpose(), P_ari.transpose();
  v.dataset_view.resize(n, 3 * m);
  v.dataset_view << P_acc, P_nmi, P_ari;
  return v;
}

}  // namespace clubench
