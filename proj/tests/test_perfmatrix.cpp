#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "clubench/perfmatrix.hpp"
#include "clubench/rng.hpp"

using namespace clubench;

namespace {

std::vector<RunResult> toy_results() {
  std::vector<RunResult> out;
  Grid g = enumerate_grid(Algorithm::KMeans);
  for (const std::string& ds : {"a", "b"}) {
    for (int c = 0; c < 3; ++c) {
      for (int rep = 0; rep < 2; ++rep) {
        RunResult r;
        r.dataset = ds;
        r.config_id = g.config_ids[static_cast<std::size_t>(c)];
        r.repeat = rep;
        r.ok = true;
        r.acc = 0.1 * c + (ds == "a" ? 0.5 : 0.2) + 0.01 * rep;
        r.nmi = *r.acc / 2;
        r.ari = *r.acc / 3;
        out.push_back(r);
      }
    }
  }
  return out;
}

Eigen::MatrixXd synthetic_low_rank(int n, int h, int rank, std::uint64_t seed) {
  // non-negative factors, scaled (not shifted) into [0,1] so the rank is exact
  Rng rng(seed);
  Eigen::MatrixXd U(n, rank), V(h, rank);
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < rank; ++r) U(i, r) = rng.uniform();
  for (int j = 0; j < h; ++j)
    for (int r = 0; r < rank; ++r) V(j, r) = rng.uniform();
  Eigen::MatrixXd P = U * V.transpose();
  return P / P.maxCoeff();
}

}  // namespace

TEST_CASE("build_matrix averages repeats and flags missing cells") {
  auto results = toy_results();
  PerformanceMatrix pm = build_matrix(results, MetricKind::acc);
  CHECK(pm.rows() == 2);
  CHECK(pm.cols() == 3);
  CHECK(pm.observed.all());
  CHECK(pm.row_names[0] == "a");
  // repeat mean of 0.5 and 0.51
  CHECK(pm.P(0, 0) == doctest::Approx(0.505));

  // one config never succeeds -> all-false column
  for (auto& r : results)
    if (r.config_id == pm.col_names[2]) {
      r.ok = false;
      r.acc.reset();
      r.nmi.reset();
      r.ari.reset();
    }
  PerformanceMatrix holed = build_matrix(results, MetricKind::acc);
  CHECK_FALSE(holed.observed.col(2).any());
  CHECK(holed.observed.col(0).all());
}

TEST_CASE("build_matrix rejects duplicate cells") {
  auto results = toy_results();
  results.push_back(results.front());
  CHECK_THROWS_AS(build_matrix(results, MetricKind::acc), std::invalid_argument);
}

TEST_CASE("matrix csv round-trip preserves values and holes") {
  auto results = toy_results();
  results.erase(results.begin(), results.begin() + 2);  // drop dataset a, config 0
  PerformanceMatrix pm = build_matrix(results, MetricKind::acc);
  auto path = (std::filesystem::temp_directory_path() / "clubench_matrix_rt.csv").string();
  write_matrix_csv(path, pm);
  PerformanceMatrix back = read_matrix_csv(path, MetricKind::acc);
  CHECK(back.row_names == pm.row_names);
  CHECK(back.col_names == pm.col_names);
  CHECK((back.observed == pm.observed).all());
  for (int i = 0; i < pm.rows(); ++i)
    for (int j = 0; j < pm.cols(); ++j)
      if (pm.observed(i, j)) CHECK(back.P(i, j) == pm.P(i, j));
}

TEST_CASE("ccr hand values") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  CHECK(ccr(d, 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(ccr(d, 2) == doctest::Approx(1.0).epsilon(1e-15));

  Eigen::MatrixXd rank1 = Eigen::VectorXd::LinSpaced(5, 1, 5) *
                          Eigen::RowVectorXd::LinSpaced(4, 1, 4);
  CHECK(ccr(rank1, 1) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(ccr(d, 0), std::invalid_argument);
  CHECK_THROWS_AS(ccr(d, 3), std::invalid_argument);
}

TEST_CASE("ccr is non-decreasing and hits 1 at full index") {
  Eigen::MatrixXd P = synthetic_low_rank(20, 15, 6, 3);
  double prev = 0;
  for (int j = 1; j <= 15; ++j) {
    double v = ccr(P, j);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mcar mask hides the exact count, deterministically") {
  Eigen::MatrixXd P = synthetic_low_rank(131, 273, 5, 4);
  Mask m1 = mcar_mask(P, 0.5, 11);
  Mask m2 = mcar_mask(P, 0.5, 11);
  CHECK((m1 == m2).all());
  long long hidden = 0;
  for (int i = 0; i < m1.rows(); ++i)
    for (int j = 0; j < m1.cols(); ++j)
      if (!m1(i, j)) ++hidden;
  CHECK(hidden == 17882);  // round(0.5 * 131 * 273)
  for (int i = 0; i < m1.rows(); ++i) CHECK(m1.row(i).any());
  for (int j = 0; j < m1.cols(); ++j) CHECK(m1.col(j).any());

  CHECK_THROWS_AS(mcar_mask(P, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(mcar_mask(P, 1.0, 1), std::invalid_argument);
}

TEST_CASE("mcar mask in the mr->0 limit hides nothing") {
  Eigen::MatrixXd P = Eigen::MatrixXd::Constant(6, 7, 0.3);
  Mask m = mcar_mask(P, 1e-12, 5);
  CHECK(m.all());
}

TEST_CASE("mcar mask resampling exhausts when no valid mask exists") {
  // 2 x 50 at mr = 0.9 leaves 10 observed cells for 50 columns: some column
  // is always empty, so all 100 attempts must fail
  Eigen::MatrixXd P = Eigen::MatrixXd::Constant(2, 50, 0.5);
  CHECK_THROWS_AS(mcar_mask(P, 0.9, 3), std::runtime_error);
}

TEST_CASE("completion interpolates an exactly low-rank fully observed matrix") {
  Eigen::MatrixXd P = synthetic_low_rank(30, 25, 5, 5);
  Mask all = Mask::Constant(30, 25, true);
  Factorization f = complete(P, all, 5, 100, 1e-10);
  double rel = (f.reconstruct() - P).norm() / P.norm();
  CHECK(rel < 1e-6);

  // full-rank completion of a fully observed matrix reproduces it
  Factorization g = complete(P, all, 25, 100, 1e-12);
  CHECK((g.reconstruct() - P).norm() / P.norm() < 1e-8);
}

TEST_CASE("completion objective is non-increasing and recovery is accurate") {
  Eigen::MatrixXd P = synthetic_low_rank(60, 50, 8, 6);
  Mask observed = mcar_mask(P, 0.5, 21);
  Factorization f = complete(P, observed, 8, 200, 1e-9);
  for (std::size_t i = 1; i < f.objective_trace.size(); ++i)
    CHECK(f.objective_trace[i] <= f.objective_trace[i - 1] + 1e-9 * std::max(1.0, f.objective_trace[i - 1]));
  Mask hidden = !observed;
  CHECK(mape(P, f.reconstruct(), hidden) < 0.05);
}

TEST_CASE("completion rejects bad inputs") {
  Eigen::MatrixXd P = synthetic_low_rank(10, 8, 2, 7);
  Mask ok = Mask::Constant(10, 8, true);
  CHECK_THROWS_AS(complete(P, ok, 9), std::invalid_argument);
  Mask empty_row = ok;
  empty_row.row(3).setConstant(false);
  CHECK_THROWS_AS(complete(P, empty_row, 2), std::invalid_argument);
}

TEST_CASE("mape hand values and floor") {
  Eigen::MatrixXd a(1, 2), b(1, 2);
  a << 0.5, 0.0;
  b << 0.6, 0.001;
  Mask first = Mask::Constant(1, 2, false);
  first(0, 0) = true;
  CHECK(mape(a, b, first) == doctest::Approx(0.2).epsilon(1e-12));
  Mask second = Mask::Constant(1, 2, false);
  second(0, 1) = true;
  CHECK(mape(a, b, second) == doctest::Approx(1.0).epsilon(1e-12));  // floored denominator
  CHECK(mape(a, a, first) == 0.0);
  Mask none = Mask::Constant(1, 2, false);
  CHECK_THROWS_AS(mape(a, b, none), std::invalid_argument);
}

TEST_CASE("ranks: ties, conservation, dominance") {
  SUBCASE("identical columns all rank (M+1)/2") {
    Eigen::MatrixXd P = Eigen::MatrixXd::Constant(5, 3, 0.4);
    RankReport r = ranks_and_tests(P);
    for (double v : r.avg_rank) CHECK(v == doctest::Approx(2.0));
    CHECK(r.p_values(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("rank sums are conserved") {
    Rng rng(9);
    Eigen::MatrixXd P(7, 4);
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 4; ++j) P(i, j) = rng.uniform();
    RankReport r = ranks_and_tests(P);
    double sum = 0;
    for (double v : r.avg_rank) sum += v;
    CHECK(sum * 7 == doctest::Approx(7 * 4 * 5 / 2.0));  // N * M(M+1)/2
  }
  SUBCASE("a strictly dominating column ranks 1 with small p") {
    Rng rng(10);
    Eigen::MatrixXd P(30, 3);
    for (int i = 0; i < 30; ++i) {
      P(i, 1) = rng.uniform(0.0, 0.6);
      P(i, 2) = rng.uniform(0.0, 0.6);
      P(i, 0) = 0.7 + rng.uniform(0.0, 0.2);
    }
    RankReport r = ranks_and_tests(P);
    CHECK(r.avg_rank[0] == doctest::Approx(1.0));
    CHECK(r.p_values(0, 1) < 0.05);
    CHECK(r.p_values(0, 2) < 0.05);
  }
  SUBCASE("zero-variance nonzero difference is flagged degenerate with p=0") {
    Eigen::MatrixXd P(4, 2);
    P << 0.5, 0.4, 0.6, 0.5, 0.7, 0.6, 0.8, 0.7;  // constant difference 0.1
    RankReport r = ranks_and_tests(P);
    CHECK(r.p_values(0, 1) == 0.0);
    CHECK(r.degenerate(0, 1));
  }
}

TEST_CASE("performance vectors concatenate in [acc|nmi|ari] block order") {
  Eigen::MatrixXd pa(3, 2), pn(3, 2), pr(3, 2);
  pa << 1, 2, 3, 4, 5, 6;
  pn = pa.array() + 10;
  pr = pa.array() + 20;
  PerformanceViews v = performance_vectors(pa, pn, pr);
  CHECK(v.algorithm_view.rows() == 2);
  CHECK(v.algorithm_view.cols() == 9);
  CHECK(v.dataset_view.rows() == 3);
  CHECK(v.dataset_view.cols() == 6);
  // algorithm 0: acc column (1,3,5), then nmi block, then ari block
  CHECK(v.algorithm_view(0, 0) == 1);
  CHECK(v.algorithm_view(0, 3) == 11);
  CHECK(v.algorithm_view(0, 6) == 21);
  // dataset 0: [acc row | nmi row | ari row]
  CHECK(v.dataset_view(0, 0) == 1);
  CHECK(v.dataset_view(0, 2) == 11);
  CHECK(v.dataset_view(0, 4) == 21);

  // permutation alignment: permuting dataset order permutes all blocks consistently
  std::vector<int> perm = {2, 0, 1};
  Eigen::MatrixXd qa(3, 2), qn(3, 2), qr(3, 2);
  for (int i = 0; i < 3; ++i) {
    qa.row(i) = pa.row(perm[static_cast<std::size_t>(i)]);
    qn.row(i) = pn.row(perm[static_cast<std::size_t>(i)]);
    qr.row(i) = pr.row(perm[static_cast<std::size_t>(i)]);
  }
  PerformanceViews vp = performance_vectors(qa, qn, qr);
  for (int i = 0; i < 3; ++i)
    CHECK(vp.dataset_view.row(i).isApprox(v.dataset_view.row(perm[static_cast<std::size_t>(i)])));

  Eigen::MatrixXd bad(2, 2);
  CHECK_THROWS_AS(performance_vectors(pa, bad, pr), std::invalid_argument);
}

TEST_CASE("best_per_algorithm reduces to per-dataset maxima") {
  auto results = toy_results();
  PerformanceMatrix pm = build_matrix(results, MetricKind::acc);
  std::vector<std::string> algos;
  Eigen::MatrixXd best = best_per_algorithm(pm, algos);
  REQUIRE(algos.size() == 1);
  CHECK(algos[0] == "KMeans");
  CHECK(best(0, 0) == doctest::Approx(0.705));  // dataset a: max(0.505, 0.605, 0.705)
}
