#include "clubench/selector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "clubench/rng.hpp"

namespace clubench {

namespace {

struct TreeBuilder {
  const Eigen::MatrixXd& Z;
  const Eigen::MatrixXd& P;
  const Mask& observed;
  const SelectorOptions& opts;
  int features_per_split;
  Rng rng;
  std::vector<TreeNode> nodes;
  std::vector<double> fallback;  // per-target mean over the bootstrap sample

  // sum of squared errors around per-target masked means
  double impurity(const std::vector<int>& rows) const {
    const int h = static_cast<int>(P.cols());
    double total = 0.0;
    for (int t = 0; t < h; ++t) {
      double sum = 0.0, sq = 0.0;
      int count = 0;
      for (int r : rows) {
        if (!observed(r, t)) continue;
        double v = P(r, t);
        sum += v;
        sq += v * v;
        ++count;
      }
      if (count > 0) total += sq - sum * sum / count;
    }
    return total;
  }

  std::vector<double> leaf_value(const std::vector<int>& rows) const {
    const int h = static_cast<int>(P.cols());
    std::vector<double> out(static_cast<std::size_t>(h), 0.0);
    for (int t = 0; t < h; ++t) {
      double sum = 0.0;
      int count = 0;
      for (int r : rows) {
        if (!observed(r, t)) continue;
        sum += P(r, t);
        ++count;
      }
      out[static_cast<std::size_t>(t)] = count > 0 ? sum / count : fallback[static_cast<std::size_t>(t)];
    }
    return out;
  }

  int build(std::vector<int>& rows, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();

    bool make_leaf = depth >= opts.max_depth ||
                     static_cast<int>(rows.size()) < 2 * opts.min_leaf;
    double node_impurity = 0.0;
    if (!make_leaf) {
      node_impurity = impurity(rows);
      if (node_impurity <= 1e-12) make_leaf = true;
    }

    int best_feature = -1;
    double best_threshold = 0.0, best_gain = 1e-12;
    if (!make_leaf) {
      const int f_total = static_cast<int>(Z.cols());
      std::vector<int> candidates(static_cast<std::size_t>(f_total));
      std::iota(candidates.begin(), candidates.end(), 0);
      for (int i = 0; i < features_per_split && i < f_total; ++i) {
        int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(f_total - i)));
        std::swap(candidates[static_cast<std::size_t>(i)], candidates[static_cast<std::size_t>(j)]);
      }

      std::vector<int> sorted_rows;
      for (int fi = 0; fi < features_per_split && fi < f_total; ++fi) {
        int f = candidates[static_cast<std::size_t>(fi)];
        sorted_rows = rows;
        std::sort(sorted_rows.begin(), sorted_rows.end(), [this, f](int a, int b) {
          if (Z(a, f) != Z(b, f)) return Z(a, f) < Z(b, f);
          return a < b;
        });
        // prefix sums per target over the sorted order
        const int h = static_cast<int>(P.cols());
        const int nr = static_cast<int>(sorted_rows.size());
        // incremental split scan: maintain left sums
        std::vector<double> lsum(static_cast<std::size_t>(h), 0.0), lsq(static_cast<std::size_t>(h), 0.0);
        std::vector<int> lcnt(static_cast<std::size_t>(h), 0);
        std::vector<double> tsum(static_cast<std::size_t>(h), 0.0), tsq(static_cast<std::size_t>(h), 0.0);
        std::vector<int> tcnt(static_cast<std::size_t>(h), 0);
        for (int r : sorted_rows) {
          for (int t = 0; t < h; ++t) {
            if (!observed(r, t)) continue;
            tsum[static_cast<std::size_t>(t)] += P(r, t);
            tsq[static_cast<std::size_t>(t)] += P(r, t) * P(r, t);
            tcnt[static_cast<std::size_t>(t)]++;
          }
        }
        for (int s = 0; s < nr - 1; ++s) {
          int r = sorted_rows[static_cast<std::size_t>(s)];
          for (int t = 0; t < h; ++t) {
            if (!observed(r, t)) continue;
            lsum[static_cast<std::size_t>(t)] += P(r, t);
            lsq[static_cast<std::size_t>(t)] += P(r, t) * P(r, t);
            lcnt[static_cast<std::size_t>(t)]++;
          }
          int left_n = s + 1, right_n = nr - left_n;
          if (left_n < opts.min_leaf || right_n < opts.min_leaf) continue;
          double va = Z(r, f);
          double vb = Z(sorted_rows[static_cast<std::size_t>(s) + 1], f);
          if (va == vb) continue;  // not a valid cut point
          double child_impurity = 0.0;
          for (int t = 0; t < h; ++t) {
            const std::size_t ts = static_cast<std::size_t>(t);
            if (lcnt[ts] > 0) child_impurity += lsq[ts] - lsum[ts] * lsum[ts] / lcnt[ts];
            int rc = tcnt[ts] - lcnt[ts];
            if (rc > 0) {
              double rsum = tsum[ts] - lsum[ts];
              double rsq = tsq[ts] - lsq[ts];
              child_impurity += rsq - rsum * rsum / rc;
            }
          }
          double gain = node_impurity - child_impurity;
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = f;
            best_threshold = 0.5 * (va + vb);
          }
        }
      }
      if (best_feature < 0) make_leaf = true;
    }

    if (make_leaf) {
      nodes[static_cast<std::size_t>(id)].leaf = leaf_value(rows);
      return id;
    }

    std::vector<int> left_rows, right_rows;
    for (int r : rows) {
      (Z(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
    }
    nodes[static_cast<std::size_t>(id)].feature = best_feature;
    nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
    int left_id = build(left_rows, depth + 1);
    int right_id = build(right_rows, depth + 1);
    nodes[static_cast<std::size_t>(id)].left = left_id;
    nodes[static_cast<std::size_t>(id)].right = right_id;
    return id;
  }
};

const std::vector<double>& tree_leaf(const RegressionTree& tree, const Eigen::VectorXd& z) {
  int node = 0;
  for (;;) {
    const TreeNode& t = tree.nodes[static_cast<std::size_t>(node)];
    if (t.feature < 0) return t.leaf;
    node = (z(t.feature) <= t.threshold) ? t.left : t.right;
  }
}

}  // namespace

SelectorModel fit_selector(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& P,
                           const Mask& observed, const SelectorOptions& opts,
                           std::vector<std::string> feature_manifest,
                           std::vector<std::string> target_manifest, MetricKind metric) {
  const int t = static_cast<int>(Z.rows());
  const int f = static_cast<int>(Z.cols());
  const int h = static_cast<int>(P.cols());
  if (t < 5) throw std::invalid_argument("fit_selector: need at least 5 training datasets");
  if (f < 1) throw std::invalid_argument("fit_selector: need at least 1 feature");
  if (P.rows() != t) throw std::invalid_argument("fit_selector: Z/P row mismatch");
  if (!Z.allFinite()) throw std::invalid_argument("fit_selector: Z contains NaN/Inf");
  if (static_cast<int>(feature_manifest.size()) != f)
    throw std::invalid_argument("fit_selector: feature manifest length mismatch");
  if (static_cast<int>(target_manifest.size()) != h)
    throw std::invalid_argument("fit_selector: target manifest length mismatch");

  SelectorModel model;
  model.feature_manifest = std::move(feature_manifest);
  model.target_manifest = std::move(target_manifest);
  model.metric = metric;
  model.options = opts;

  const int features_per_split =
      std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(f)))));

  Rng master(opts.seed);
  model.forest.reserve(static_cast<std::size_t>(opts.trees));
  for (int tree_i = 0; tree_i < opts.trees; ++tree_i) {
    Rng tree_rng(master.fork(static_cast<std::uint64_t>(tree_i)));
    std::vector<int> rows(static_cast<std::size_t>(t));
    for (int i = 0; i < t; ++i)
      rows[static_cast<std::size_t>(i)] = static_cast<int>(tree_rng.below(static_cast<std::uint64_t>(t)));

    TreeBuilder builder{Z, P, observed, opts,
                        features_per_split, Rng(tree_rng.fork(0xbeef)), {}, {}};
    builder.fallback.assign(static_cast<std::size_t>(h), 0.0);
    for (int target = 0; target < h; ++target) {
      double sum = 0.0;
      int count = 0;
      for (int r : rows) {
        if (!observed(r, target)) continue;
        sum += P(r, target);
        ++count;
      }
      builder.fallback[static_cast<std::size_t>(target)] = count > 0 ? sum / count : 0.0;
    }
    builder.build(rows, 0);
    model.forest.push_back(RegressionTree{std::move(builder.nodes)});
  }
  return model;
}

std::vector<double> predict(const SelectorModel& model, const Eigen::VectorXd& z) {
  if (z.size() != static_cast<Eigen::Index>(model.feature_manifest.size()))
    throw std::invalid_argument("predict: feature vector length mismatch");
  const std::size_t h = model.target_manifest.size();
  std::vector<double> out(h, 0.0);
  for (const auto& tree : model.forest) {
    const auto& leaf = tree_leaf(tree, z);
    for (std::size_t i = 0; i < h; ++i) out[i] += leaf[i];
  }
  for (double& v : out) v /= static_cast<double>(model.forest.size());
  return out;
}

SelectionOutcome predict_and_select(const SelectorModel& model, const Eigen::VectorXd& z,
                                    const std::vector<std::string>& feature_manifest) {
  if (feature_manifest != model.feature_manifest)
    throw std::invalid_argument("predict_and_select: feature manifest mismatch");
  std::vector<double> scores = predict(model, z);
  int best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j)
    if (scores[j] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(j);
  SelectionOutcome out;
  out.strategy = "regressor";
  out.column = best;
  out.config_id = model.target_manifest[static_cast<std::size_t>(best)];
  return out;
}

std::vector<SelectionOutcome> baselines(const PerformanceMatrix& pm,
                                        const std::vector<int>& train_rows,
                                        const std::vector<int>& test_rows,
                                        BaselineStrategy strategy,
                                        const std::string& algorithm) {
  std::vector<SelectionOutcome> out;
  if (strategy == BaselineStrategy::eub) {
    for (int i : test_rows) {
      SelectionOutcome o;
      o.strategy = "EUB";
      for (int j = 0; j < pm.cols(); ++j) {
        if (!pm.observed(i, j)) continue;
        if (!o.realized || pm.P(i, j) > *o.realized) {
          o.realized = pm.P(i, j);
          o.column = j;
          o.config_id = pm.col_names[static_cast<std::size_t>(j)];
        }
      }
      out.push_back(std::move(o));
    }
    return out;
  }

  // historical best within one algorithm: highest train-row mean
  int best_col = -1;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < pm.cols(); ++j) {
    if (algorithm_of_config_id(pm.col_names[static_cast<std::size_t>(j)]) != algorithm) continue;
    double sum = 0.0;
    int count = 0;
    for (int i : train_rows) {
      if (!pm.observed(i, j)) continue;
      sum += pm.P(i, j);
      ++count;
    }
    if (count == 0) continue;
    double mean = sum / count;
    if (mean > best_mean) {
      best_mean = mean;
      best_col = j;
    }
  }
  if (best_col < 0)
    throw std::invalid_argument("baselines: no observed training cells for " + algorithm);
  for (int i : test_rows) {
    SelectionOutcome o;
    o.strategy = "historical_best:" + algorithm;
    o.column = best_col;
    o.config_id = pm.col_names[static_cast<std::size_t>(best_col)];
    if (pm.observed(i, best_col)) o.realized = pm.P(i, best_col);
    out.push_back(std::move(o));
  }
  return out;
}

namespace {

// mean of realized scores over outcomes with observed truth
std::optional<double> mean_realized(const std::vector<SelectionOutcome>& outcomes) {
  double sum = 0.0;
  int count = 0;
  for (const auto& o : outcomes) {
    if (o.realized) {
      sum += *o.realized;
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

}  // namespace

CvReport cross_validate(const Eigen::MatrixXd& Z, const std::vector<std::string>& feature_manifest,
                        const PerformanceMatrix& P_acc, const PerformanceMatrix& P_nmi,
                        const PerformanceMatrix& P_ari, int folds, const SelectorOptions& opts) {
  const int n = static_cast<int>(Z.rows());
  if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
  if (P_acc.rows() != n || P_nmi.rows() != n || P_ari.rows() != n)
    throw std::invalid_argument("cross_validate: matrix row mismatch");
  if (n < folds) throw std::invalid_argument("cross_validate: more folds than datasets");

  const PerformanceMatrix* matrices[3] = {&P_acc, &P_nmi, &P_ari};

  // strategies: regressor, EUB, historical_best per algorithm (column order)
  std::vector<std::string> algorithms;
  for (const auto& id : P_acc.col_names) {
    std::string a = algorithm_of_config_id(id);
    if (std::find(algorithms.begin(), algorithms.end(), a) == algorithms.end())
      algorithms.push_back(a);
  }
  CvReport rep;
  rep.strategies.push_back("regressor");
  rep.strategies.push_back("EUB");
  for (const auto& a : algorithms) rep.strategies.push_back("historical_best:" + a);
  const int n_strategies = static_cast<int>(rep.strategies.size());

  // seeded fold partition
  Rng rng(opts.seed);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  rep.folds.assign(static_cast<std::size_t>(folds), {});
  for (int i = 0; i < n; ++i)
    rep.folds[static_cast<std::size_t>(i % folds)].push_back(perm[static_cast<std::size_t>(i)]);

  // accumulate realized scores per strategy/metric over all test datasets
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n_strategies, 3);
  Eigen::MatrixXi count = Eigen::MatrixXi::Zero(n_strategies, 3);

  for (int fold = 0; fold < folds; ++fold) {
    const std::vector<int>& test_rows = rep.folds[static_cast<std::size_t>(fold)];
    std::vector<int> train_rows;
    for (int f2 = 0; f2 < folds; ++f2) {
      if (f2 == fold) continue;
      for (int r : rep.folds[static_cast<std::size_t>(f2)]) train_rows.push_back(r);
    }
    std::sort(train_rows.begin(), train_rows.end());

    Eigen::MatrixXd fold_scores = Eigen::MatrixXd::Constant(n_strategies, 3, -1e30);

    for (int m = 0; m < 3; ++m) {
      const PerformanceMatrix& pm = *matrices[m];

      Eigen::MatrixXd Ztrain(train_rows.size(), Z.cols());
      Eigen::MatrixXd Ptrain(train_rows.size(), pm.cols());
      Mask Otrain(train_rows.size(), pm.cols());
      for (std::size_t i = 0; i < train_rows.size(); ++i) {
        Ztrain.row(static_cast<Eigen::Index>(i)) = Z.row(train_rows[i]);
        Ptrain.row(static_cast<Eigen::Index>(i)) = pm.P.row(train_rows[i]);
        Otrain.row(static_cast<Eigen::Index>(i)) = pm.observed.row(train_rows[i]);
      }
      SelectorOptions fold_opts = opts;
      fold_opts.seed = stable_hash64("fold" + std::to_string(fold) + "metric" + std::to_string(m),
                                     opts.seed);
      SelectorModel model = fit_selector(Ztrain, Ptrain, Otrain, fold_opts, feature_manifest,
                                         pm.col_names, pm.metric);

      std::vector<SelectionOutcome> reg_outcomes;
      for (int i : test_rows) {
        SelectionOutcome o = predict_and_select(model, Z.row(i).transpose(), feature_manifest);
        if (pm.observed(i, o.column)) o.realized = pm.P(i, o.column);
        reg_outcomes.push_back(std::move(o));
      }
      auto eub_outcomes = baselines(pm, train_rows, test_rows, BaselineStrategy::eub);
      std::vector<std::vector<SelectionOutcome>> hist_outcomes;
      for (const auto& a : algorithms)
        hist_outcomes.push_back(
            baselines(pm, train_rows, test_rows, BaselineStrategy::historical_best, a));

      auto accumulate = [&](int strategy_idx, const std::vector<SelectionOutcome>& outs) {
        double sum = 0.0;
        int c = 0;
        for (const auto& o : outs) {
          if (o.realized) {
            sum += *o.realized;
            ++c;
          }
        }
        if (c > 0) {
          total(strategy_idx, m) += sum;
          count(strategy_idx, m) += c;
          fold_scores(strategy_idx, m) = sum / c;
        }
      };
      accumulate(0, reg_outcomes);
      accumulate(1, eub_outcomes);
      for (std::size_t a = 0; a < hist_outcomes.size(); ++a)
        accumulate(2 + static_cast<int>(a), hist_outcomes[a]);
    }
    rep.fold_scores.push_back(std::move(fold_scores));
  }

  rep.scores = Eigen::MatrixXd::Zero(n_strategies, 3);
  for (int s = 0; s < n_strategies; ++s)
    for (int m = 0; m < 3; ++m)
      rep.scores(s, m) = count(s, m) > 0 ? total(s, m) / count(s, m) : 0.0;
  return rep;
}

nlohmann::json SelectorModel::to_json() const {
  nlohmann::json j;
  j["metric"] = to_string(metric);
  j["seed"] = options.seed;
  j["trees"] = options.trees;
  j["max_depth"] = options.max_depth;
  j["min_leaf"] = options.min_leaf;
  j["feature_manifest"] = feature_manifest;
  j["target_manifest"] = target_manifest;
  nlohmann::json forest_json = nlohmann::json::array();
  for (const auto& tree : forest) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& node : tree.nodes) {
      nlohmann::json item;
      item["f"] = node.feature;
      item["t"] = node.threshold;
      item["l"] = node.left;
      item["r"] = node.right;
      if (node.feature < 0) item["v"] = node.leaf;
      nodes.push_back(std::move(item));
    }
    forest_json.push_back(std::move(nodes));
  }
  j["forest"] = std::move(forest_json);
  return j;
}

SelectorModel SelectorModel::from_json(const nlohmann::json& j) {
  SelectorModel m;
  m.metric = metric_kind_from_string(j.at("metric").get<std::string>());
  m.options.seed = j.at("seed").get<std::uint64_t>();
  m.options.trees = j.at("trees").get<int>();
  m.options.max_depth = j.at("max_depth").get<int>();
  m.options.min_leaf = j.at("min_leaf").get<int>();
  m.feature_manifest = j.at("feature_manifest").get<std::vector<std::string>>();
  m.target_manifest = j.at("target_manifest").get<std::vector<std::string>>();
  for (const auto& nodes : j.at("forest")) {
    RegressionTree tree;
    for (const auto& item : nodes) {
      TreeNode node;
      node.feature = item.at("f").get<int>();
      node.threshold = item.at("t").get<double>();
      node.left = item.at("l").get<int>();
      node.right = item.at("r").get<int>();
      if (node.feature < 0) node.leaf = item.at("v").get<std::vector<double>>();
      tree.nodes.push_back(std::move(node));
    }
    m.forest.push_back(std::move(tree));
  }
  return m;
}

}  // namespace clubench
