#include <doctest.h>

#include <cmath>

#include "clubench/rng.hpp"
#include "clubench/selector.hpp"

using namespace clubench;

namespace {

std::vector<std::string> fake_features(int f) {
  std::vector<std::string> out;
  for (int i = 0; i < f; ++i) out.push_back("z" + std::to_string(i));
  return out;
}

std::vector<std::string> fake_targets(int h) {
  std::vector<std::string> out;
  for (int i = 0; i < h; ++i) out.push_back("KMeans/c" + std::to_string(i));
  return out;
}

// fixture where the best column is a deterministic function of 3 features
struct Fixture {
  Eigen::MatrixXd Z;
  Eigen::MatrixXd P;
  Mask observed;
  std::vector<std::string> features, targets;
};

Fixture make_fixture(int t, int h, int f, std::uint64_t seed) {
  Rng rng(seed);
  Fixture fx;
  fx.Z.resize(t, f);
  fx.P.resize(t, h);
  fx.observed = Mask::Constant(t, h, true);
  fx.features = fake_features(f);
  fx.targets = fake_targets(h);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < f; ++j) fx.Z(i, j) = rng.uniform(-1.0, 1.0);
    int group = (fx.Z(i, 0) > 0) * 4 + (fx.Z(i, 1) > 0) * 2 + (fx.Z(i, 2) > 0);
    int best_col = group * h / 8;
    for (int j = 0; j < h; ++j) {
      double dist = std::abs(j - best_col);
      fx.P(i, j) = 0.9 - 0.5 * dist / h + 0.01 * rng.uniform();
    }
  }
  return fx;
}

}  // namespace

TEST_CASE("constant targets predict that constant everywhere") {
  Fixture fx = make_fixture(30, 5, 4, 1);
  fx.P.setConstant(0.42);
  SelectorOptions opts;
  opts.trees = 20;
  opts.seed = 3;
  SelectorModel m = fit_selector(fx.Z, fx.P, fx.observed, opts, fx.features, fx.targets,
                                 MetricKind::acc);
  auto pred = predict(m, fx.Z.row(0).transpose());
  for (double v : pred) CHECK(v == doctest::Approx(0.42).epsilon(1e-9));
}

TEST_CASE("forest learns a threshold rule out of bag") {
  // target 1 exactly when feature 3 > 0, else 0
  Rng rng(5);
  const int t = 200;
  Eigen::MatrixXd Z(t, 6);
  Eigen::MatrixXd P(t, 1);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < 6; ++j) Z(i, j) = rng.uniform(-1.0, 1.0);
    P(i, 0) = Z(i, 3) > 0 ? 1.0 : 0.0;
  }
  Mask obs = Mask::Constant(t, 1, true);
  SelectorOptions opts;
  opts.trees = 100;
  opts.seed = 17;
  SelectorModel m = fit_selector(Z, P, obs, opts, fake_features(6), {"only"}, MetricKind::acc);

  Rng test_rng(1234);
  double se = 0;
  const int holdout = 200;
  for (int i = 0; i < holdout; ++i) {
    Eigen::VectorXd z(6);
    for (int j = 0; j < 6; ++j) z(j) = test_rng.uniform(-1.0, 1.0);
    double want = z(3) > 0 ? 1.0 : 0.0;
    double got = predict(m, z)[0];
    se += (want - got) * (want - got);
  }
  CHECK(se / holdout < 0.01);
}

TEST_CASE("same seed gives byte-identical serialized forests") {
  Fixture fx = make_fixture(40, 8, 5, 7);
  SelectorOptions opts;
  opts.trees = 30;
  opts.seed = 99;
  SelectorModel a = fit_selector(fx.Z, fx.P, fx.observed, opts, fx.features, fx.targets,
                                 MetricKind::acc);
  SelectorModel b = fit_selector(fx.Z, fx.P, fx.observed, opts, fx.features, fx.targets,
                                 MetricKind::acc);
  CHECK(a.to_json().dump() == b.to_json().dump());

  SelectorModel c = SelectorModel::from_json(a.to_json());
  auto pa = predict(a, fx.Z.row(3).transpose());
  auto pc = predict(c, fx.Z.row(3).transpose());
  CHECK(pa == pc);
}

TEST_CASE("prediction equals the mean of per-tree leaf vectors") {
  Fixture fx = make_fixture(25, 6, 4, 9);
  SelectorOptions opts;
  opts.trees = 7;
  opts.seed = 21;
  SelectorModel m = fit_selector(fx.Z, fx.P, fx.observed, opts, fx.features, fx.targets,
                                 MetricKind::acc);
  Rng rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    Eigen::VectorXd z(4);
    for (int j = 0; j < 4; ++j) z(j) = rng.uniform(-1.0, 1.0);
    auto fast = predict(m, z);
    // manual traversal
    std::vector<double> manual(6, 0.0);
    for (const auto& tree : m.forest) {
      int node = 0;
      while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
        node = z(nd.feature) <= nd.threshold ? nd.left : nd.right;
      }
      const auto& leaf = tree.nodes[static_cast<std::size_t>(node)].leaf;
      for (int j = 0; j < 6; ++j) manual[static_cast<std::size_t>(j)] += leaf[static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < 6; ++j) {
      manual[static_cast<std::size_t>(j)] /= 7.0;
      CHECK(fast[static_cast<std::size_t>(j)] == doctest::Approx(manual[static_cast<std::size_t>(j)]).epsilon(1e-12));
    }
  }
}

TEST_CASE("selection breaks ties toward the lowest column") {
  Fixture fx = make_fixture(30, 4, 4, 11);
  fx.P.setConstant(0.5);  // all predictions tie
  SelectorOptions opts;
  opts.trees = 10;
  opts.seed = 1;
  SelectorModel m = fit_selector(fx.Z, fx.P, fx.observed, opts, fx.features, fx.targets,
                                 MetricKind::acc);
  SelectionOutcome o = predict_and_select(m, fx.Z.row(0).transpose(), fx.features);
  CHECK(o.column == 0);
  CHECK(o.config_id == fx.targets[0]);

  std::vector<std::string> wrong = fx.features;
  wrong[0] = "renamed";
  CHECK_THROWS_AS(predict_and_select(m, fx.Z.row(0).transpose(), wrong), std::invalid_argument);
}

TEST_CASE("fit preconditions") {
  Fixture fx = make_fixture(4, 3, 2, 13);
  SelectorOptions opts;
  CHECK_THROWS_AS(fit_selector(fx.Z, fx.P, fx.observed, opts, fake_features(2), fake_targets(3),
                               MetricKind::acc),
                  std::invalid_argument);  // t < 5
}

TEST_CASE("baselines: historical best and EUB") {
  PerformanceMatrix pm;
  pm.metric = MetricKind::acc;
  pm.row_names = {"d0", "d1"};
  pm.col_names = {"KMeans/a", "KMeans/b"};
  pm.P.resize(2, 2);
  pm.P << 0.2, 0.9, 0.8, 0.1;
  pm.observed = Mask::Constant(2, 2, true);

  SUBCASE("train means decide the historical pick") {
    // train on both rows: means {0.5, 0.5}... use asymmetric matrix instead
    pm.P << 0.2, 0.6, 0.4, 0.9;  // means {0.3, 0.75} -> config b
    auto outs = baselines(pm, {0, 1}, {0, 1}, BaselineStrategy::historical_best, "KMeans");
    REQUIRE(outs.size() == 2);
    CHECK(outs[0].config_id == "KMeans/b");
    CHECK(*outs[0].realized == doctest::Approx(0.6));
    CHECK(*outs[1].realized == doctest::Approx(0.9));
  }
  SUBCASE("EUB takes the row-wise max") {
    pm.P << 0.2, 0.9, 0.8, 0.1;
    auto outs = baselines(pm, {}, {0, 1}, BaselineStrategy::eub);
    CHECK(*outs[0].realized == doctest::Approx(0.9));
    CHECK(*outs[1].realized == doctest::Approx(0.8));
    // mean(0.9, 0.8) = 0.85 per the row-max arithmetic
    CHECK(0.5 * (*outs[0].realized + *outs[1].realized) == doctest::Approx(0.85));
  }
  SUBCASE("single column: both strategies pick it") {
    PerformanceMatrix solo = pm;
    solo.col_names = {"KMeans/a"};
    solo.P = pm.P.leftCols(1);
    solo.observed = Mask::Constant(2, 1, true);
    auto h = baselines(solo, {0}, {1}, BaselineStrategy::historical_best, "KMeans");
    auto e = baselines(solo, {0}, {1}, BaselineStrategy::eub);
    CHECK(h[0].column == 0);
    CHECK(e[0].column == 0);
  }
  SUBCASE("an algorithm with no observed training cells errors") {
    pm.observed.setConstant(false);
    CHECK_THROWS_AS(baselines(pm, {0, 1}, {0}, BaselineStrategy::historical_best, "KMeans"),
                    std::invalid_argument);
  }
}

TEST_CASE("cross-validation: EUB dominates everything on every fold") {
  Fixture fx = make_fixture(60, 10, 5, 23);
  PerformanceMatrix pms[3];
  for (int m = 0; m < 3; ++m) {
    pms[m].metric = static_cast<MetricKind>(m);
    pms[m].P = fx.P;
    pms[m].observed = fx.observed;
    pms[m].col_names = fx.targets;
    for (int i = 0; i < 60; ++i) pms[m].row_names.push_back("d" + std::to_string(i));
  }
  SelectorOptions opts;
  opts.trees = 25;
  opts.seed = 31;
  CvReport rep = cross_validate(fx.Z, fx.features, pms[0], pms[1], pms[2], 5, opts);

  REQUIRE(rep.strategies[1] == "EUB");
  for (const auto& fold : rep.fold_scores) {
    for (int s = 0; s < fold.rows(); ++s) {
      for (int m = 0; m < 3; ++m) {
        if (fold(s, m) < -1e29) continue;  // strategy had no observed cell
        CHECK(fold(1, m) >= fold(s, m) - 1e-12);
      }
    }
  }
  // folds cover every dataset exactly once
  std::vector<int> seen(60, 0);
  for (const auto& fold : rep.folds)
    for (int r : fold) seen[static_cast<std::size_t>(r)]++;
  for (int c : seen) CHECK(c == 1);

  // fold partition is seed-deterministic
  CvReport rep2 = cross_validate(fx.Z, fx.features, pms[0], pms[1], pms[2], 5, opts);
  CHECK(rep.folds == rep2.folds);
  CHECK(rep.scores.isApprox(rep2.scores));
}

TEST_CASE("regressor recovers most of the EUB on the synthetic fixture") {
  Fixture fx = make_fixture(200, 50, 10, 37);
  PerformanceMatrix pms[3];
  for (int m = 0; m < 3; ++m) {
    pms[m].metric = static_cast<MetricKind>(m);
    pms[m].P = fx.P;
    pms[m].observed = fx.observed;
    pms[m].col_names = fx.targets;
    for (int i = 0; i < 200; ++i) pms[m].row_names.push_back("d" + std::to_string(i));
  }
  SelectorOptions opts;
  opts.trees = 100;
  opts.seed = 41;
  CvReport rep = cross_validate(fx.Z, fx.features, pms[0], pms[1], pms[2], 5, opts);
  double reg = rep.scores(0, 0);
  double eub = rep.scores(1, 0);
  CHECK(reg >= 0.95 * eub);
}
