#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "clubench/demo.hpp"
#include "clubench/sweep.hpp"

using namespace clubench;

TEST_CASE("grid counts match the published search space") {
  CHECK(enumerate_grid(Algorithm::KMeans).configs.size() == 6);
  CHECK(enumerate_grid(Algorithm::KernelKMeans).configs.size() == 10);
  CHECK(enumerate_grid(Algorithm::AggClu).configs.size() == 9);
  CHECK(enumerate_grid(Algorithm::DBSCAN).configs.size() == 90);
  CHECK(enumerate_grid(Algorithm::BIRCH).configs.size() == 12);
  CHECK(enumerate_grid(Algorithm::GMM).configs.size() == 6);
  CHECK(enumerate_grid(Algorithm::SpeClu).configs.size() == 11);
  CHECK(enumerate_grid(Algorithm::MeanShift).configs.size() == 12);
  CHECK(enumerate_grid(Algorithm::kPC).configs.size() == 5);
  CHECK(enumerate_grid(Algorithm::SSC).configs.size() == 5);

  std::size_t total = 0;
  for (Algorithm a : algorithm_roster()) total += enumerate_grid(a).configs.size();
  CHECK(total == 166);
}

TEST_CASE("grid enumeration is stable and lexicographic") {
  Grid a = enumerate_grid(Algorithm::DBSCAN);
  Grid b = enumerate_grid(Algorithm::DBSCAN);
  CHECK(a.config_ids == b.config_ids);
  CHECK(a.config_ids[0] == "DBSCAN/eps=0.001;min_sample=3;metric=euclidean");
  CHECK(a.config_ids[1] == "DBSCAN/eps=0.001;min_sample=3;metric=manhattan");
  CHECK(a.config_ids[3] == "DBSCAN/eps=0.001;min_sample=5;metric=euclidean");
  CHECK(a.config_ids[9] == "DBSCAN/eps=0.005;min_sample=3;metric=euclidean");

  Grid spe = enumerate_grid(Algorithm::SpeClu);
  CHECK(spe.config_ids[0] == "SpeClu/affinity=knn;k=3");
  CHECK(spe.config_ids[6] == "SpeClu/affinity=rbf;gamma=0.1");
  CHECK(spe.config_ids[10] == "SpeClu/affinity=rbf;gamma=10.0");

  CHECK(enumerate_grid(Algorithm::SSC).config_ids[0] == "SSC/lambda=100.0");
  CHECK(enumerate_grid(Algorithm::KMeans).config_ids[0] ==
        "KMeans/init=kmeans++;metric=euclidean;n_init=10;max_iter=500");
}

TEST_CASE("grid json overrides rows but keeps the row order") {
  nlohmann::json j;
  j["algorithm"] = "DBSCAN";
  j["rows"]["eps"] = {0.1, 0.2};
  j["rows"]["min_sample"] = {5};
  j["default_index"] = 1;
  Grid g = grid_from_json(j);
  CHECK(g.configs.size() == 2 * 1 * 3);
  CHECK(g.default_index == 1);
  CHECK(g.config_ids[0] == "DBSCAN/eps=0.1;min_sample=5;metric=euclidean");
  CHECK_THROWS_AS(grid_from_json(nlohmann::json{{"algorithm", "DBSCAN"},
                                                {"rows", {{"bogus", {1, 2}}}}}),
                  std::invalid_argument);
}

TEST_CASE("sweep produces one result per cell and tolerates failures") {
  std::vector<Dataset> datasets;
  datasets.push_back(make_blobs(30, 2, 2, 20.0, 0.5, 1, "a"));
  datasets.push_back(make_blobs(30, 3, 2, 20.0, 0.5, 2, "b"));

  SweepOptions opts;
  opts.repeats = 5;
  opts.base_seed = 9;
  std::vector<Grid> grids = {enumerate_grid(Algorithm::KMeans)};
  auto results = run_sweep(datasets, grids, opts);
  CHECK(results.size() == 2 * 6 * 5);
  for (const auto& r : results) {
    CHECK(r.ok);
    REQUIRE(r.acc.has_value());
    CHECK(*r.acc >= 0.0);
    CHECK(*r.acc <= 1.0);
    CHECK(r.time_s >= 0.0);
  }
}

TEST_CASE("sweep results are identical across worker counts") {
  std::vector<Dataset> datasets;
  datasets.push_back(make_blobs(25, 2, 2, 10.0, 0.8, 3, "w"));
  SweepOptions one;
  one.repeats = 2;
  one.base_seed = 4;
  one.workers = 1;
  SweepOptions eight = one;
  eight.workers = 8;
  std::vector<Grid> grids = {enumerate_grid(Algorithm::KMeans), enumerate_grid(Algorithm::GMM)};
  auto r1 = run_sweep(datasets, grids, one);
  auto r8 = run_sweep(datasets, grids, eight);
  REQUIRE(r1.size() == r8.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].dataset == r8[i].dataset);
    CHECK(r1[i].config_id == r8[i].config_id);
    CHECK(r1[i].repeat == r8[i].repeat);
    CHECK(r1[i].seed == r8[i].seed);
    CHECK(r1[i].acc == r8[i].acc);
    CHECK(r1[i].nmi == r8[i].nmi);
    CHECK(r1[i].ari == r8[i].ari);
  }
}

TEST_CASE("a config that always fails yields missing cells without aborting") {
  Dataset zeros;
  zeros.name = "degenerate";
  zeros.X = Eigen::MatrixXd::Zero(20, 1);
  zeros.y = std::vector<int>(20, 0);
  for (int i = 0; i < 10; ++i) (*zeros.y)[static_cast<std::size_t>(i)] = 1;
  zeros.K = 2;

  SweepOptions opts;
  opts.repeats = 5;
  std::vector<Grid> grids = {enumerate_grid(Algorithm::SSC)};
  // restrict to one lambda for speed
  nlohmann::json j;
  j["algorithm"] = "SSC";
  j["rows"]["lambda"] = {1.0};
  grids = {grid_from_json(j)};

  auto results = run_sweep({zeros}, grids, opts);
  CHECK(results.size() == 5);
  for (const auto& r : results) {
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.acc.has_value());
    CHECK_FALSE(r.error.empty());
  }
}

TEST_CASE("results csv round-trips metrics and missing cells") {
  std::vector<Dataset> datasets = {make_blobs(24, 2, 2, 15.0, 0.5, 5, "rt")};
  SweepOptions opts;
  opts.repeats = 2;
  auto results = run_sweep(datasets, {enumerate_grid(Algorithm::KMeans)}, opts);
  results[0].acc.reset();  // simulate a missing metric

  auto path = (std::filesystem::temp_directory_path() / "clubench_results_rt.csv").string();
  write_results_csv(path, results);
  auto back = read_results_csv(path);
  REQUIRE(back.size() == results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(back[i].dataset == results[i].dataset);
    CHECK(back[i].config_id == results[i].config_id);
    CHECK(back[i].seed == results[i].seed);
    CHECK(back[i].acc == results[i].acc);
    CHECK(back[i].nmi == results[i].nmi);
  }
}

TEST_CASE("summarize: best dominates default and hand aggregation holds") {
  // two datasets, two configs; hand-built results
  std::vector<RunResult> results;
  auto add = [&results](const std::string& ds, const std::string& cfg, int rep, double acc) {
    RunResult r;
    r.dataset = ds;
    r.config_id = cfg;
    r.repeat = rep;
    r.ok = true;
    r.acc = acc;
    r.nmi = acc / 2;
    r.ari = acc / 3;
    results.push_back(r);
  };
  Grid g = enumerate_grid(Algorithm::KMeans);
  const std::string c0 = g.config_ids[0];
  const std::string c1 = g.config_ids[1];
  add("A", c0, 0, 0.5);
  add("A", c1, 0, 0.9);
  add("B", c0, 0, 0.8);
  add("B", c1, 0, 0.6);

  SummaryTable best = summarize(results, SummaryMode::best, {g});
  SummaryTable def = summarize(results, SummaryMode::default_config, {g});
  REQUIRE(best.rows.size() == 1);
  CHECK(*best.rows[0].acc == doctest::Approx(0.85));  // (0.9 + 0.8) / 2
  CHECK(*def.rows[0].acc == doctest::Approx(0.65));   // (0.5 + 0.8) / 2
  CHECK(*best.rows[0].acc >= *def.rows[0].acc);

  // order invariance
  std::reverse(results.begin(), results.end());
  SummaryTable best2 = summarize(results, SummaryMode::best, {g});
  CHECK(*best2.rows[0].acc == doctest::Approx(*best.rows[0].acc));
}

TEST_CASE("summarize with a single config: best equals default") {
  nlohmann::json j;
  j["algorithm"] = "KMeans";
  j["rows"]["init"] = {"kmeans++"};
  j["rows"]["metric"] = {"euclidean"};
  Grid g = grid_from_json(j);
  REQUIRE(g.configs.size() == 1);

  std::vector<RunResult> results;
  RunResult r;
  r.dataset = "solo";
  r.config_id = g.config_ids[0];
  r.repeat = 0;
  r.ok = true;
  r.acc = 0.7;
  results.push_back(r);
  SummaryTable best = summarize(results, SummaryMode::best, {g});
  SummaryTable def = summarize(results, SummaryMode::default_config, {g});
  CHECK(*best.rows[0].acc == doctest::Approx(*def.rows[0].acc));
}

TEST_CASE("summarize omits an algorithm whose cells are all missing") {
  std::vector<RunResult> results;
  RunResult r;
  r.dataset = "x";
  r.config_id = enumerate_grid(Algorithm::SSC).config_ids[0];
  r.repeat = 0;
  r.ok = false;
  results.push_back(r);
  SummaryTable t = summarize(results, SummaryMode::best, {enumerate_grid(Algorithm::SSC)});
  CHECK(t.rows.empty());
  CHECK(t.warnings.size() == 1);
}

TEST_CASE("cell seeds are stable hashes of their coordinates") {
  auto s1 = cell_seed(7, "ds", "KMeans/x", 0);
  auto s2 = cell_seed(7, "ds", "KMeans/x", 0);
  auto s3 = cell_seed(7, "ds", "KMeans/x", 1);
  auto s4 = cell_seed(8, "ds", "KMeans/x", 0);
  CHECK(s1 == s2);
  CHECK(s1 != s3);
  CHECK(s1 != s4);
}
