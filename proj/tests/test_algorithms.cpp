#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "../src/algo_detail.hpp"
#include "clubench/algorithms.hpp"
#include "clubench/demo.hpp"
#include "clubench/grid.hpp"
#include "clubench/metrics.hpp"

using namespace clubench;

namespace {

AlgorithmConfig make_config(Algorithm a,
                            std::initializer_list<std::pair<const char*, const char*>> params,
                            std::optional<int> k = std::nullopt) {
  AlgorithmConfig cfg;
  cfg.algorithm = a;
  for (auto& [name, value] : params) cfg.params.emplace_back(name, ParamValue{value});
  cfg.k = k;
  return cfg;
}

bool is_valid_partition(const std::vector<int>& labels) {
  if (labels.empty()) return false;
  int c = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> counts(static_cast<std::size_t>(c), 0);
  for (int v : labels) {
    if (v < 0 || v >= c) return false;
    counts[static_cast<std::size_t>(v)]++;
  }
  return std::all_of(counts.begin(), counts.end(), [](int x) { return x > 0; });
}

}  // namespace

TEST_CASE("pairwise distance hand values") {
  Eigen::MatrixXd X(2, 2);
  X << 0, 0, 3, 4;
  CHECK(pairwise_distance(X, Metric::euclidean)(0, 1) == doctest::Approx(5.0));
  CHECK(pairwise_distance(X, Metric::manhattan)(0, 1) == doctest::Approx(7.0));

  Eigen::MatrixXd E(2, 2);
  E << 1, 0, 0, 1;
  CHECK(pairwise_distance(E, Metric::cosine)(0, 1) == doctest::Approx(1.0));

  for (Metric m : {Metric::euclidean, Metric::manhattan, Metric::cosine}) {
    Eigen::MatrixXd D = pairwise_distance(E, m);
    CHECK(D(0, 0) == 0.0);
    CHECK(D(1, 1) == 0.0);
    CHECK(D(0, 1) == D(1, 0));
  }

  Eigen::MatrixXd Z(2, 2);
  Z << 0, 0, 1, 1;
  CHECK_THROWS_AS(pairwise_distance(Z, Metric::cosine), std::invalid_argument);
}

TEST_CASE("scale bases hand values") {
  SUBCASE("two points at distance 3") {
    Eigen::MatrixXd X(2, 1);
    X << 0, 3;
    ScaleBases b = scale_bases(X, Metric::euclidean);
    CHECK(b.eps_base == doctest::Approx(3.0));
    CHECK(b.gamma_base == doctest::Approx(1.0 / 18.0));
  }
  SUBCASE("two points with squared distance 4") {
    Eigen::MatrixXd X(2, 1);
    X << 0, 2;
    ScaleBases b = scale_bases(X, Metric::euclidean);
    CHECK(b.gamma_base == doctest::Approx(1.0 / 8.0));
  }
  SUBCASE("five collinear points, all ten pair distances enumerated") {
    Eigen::MatrixXd X(5, 1);
    X << 0, 1, 2, 3, 4;
    // pairs: {1,1,1,1,2,2,2,3,3,4} -> mean 2.0
    ScaleBases b = scale_bases(X, Metric::euclidean);
    CHECK(b.eps_base == doctest::Approx(2.0));
  }
  SUBCASE("identical rows are degenerate") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(4, 2);
    CHECK_THROWS_AS(scale_bases(X, Metric::euclidean), ClusteringFailure);
  }
  SUBCASE("subsampled computation is seed deterministic") {
    Rng rng(8);
    Eigen::MatrixXd X(300, 2);
    for (int i = 0; i < 300; ++i)
      for (int j = 0; j < 2; ++j) X(i, j) = rng.normal();
    ScaleBases a = scale_bases(X, Metric::euclidean, 100, 5);
    ScaleBases b = scale_bases(X, Metric::euclidean, 100, 5);
    CHECK(a.eps_base == b.eps_base);
    CHECK(a.gamma_base == b.gamma_base);
  }
}

TEST_CASE("kmeans objective is non-increasing across lloyd iterations") {
  Rng rng(21);
  Eigen::MatrixXd X(60, 2);
  for (int i = 0; i < 60; ++i)
    for (int j = 0; j < 2; ++j) X(i, j) = rng.normal();
  Eigen::MatrixXd centers = X.topRows(4);
  std::vector<double> trace;
  detail::lloyd(X, centers, Metric::euclidean, 100, &trace);
  for (std::size_t i = 1; i < trace.size(); ++i)
    CHECK(trace[i] <= trace[i - 1] + 1e-9);
}

TEST_CASE("kmeans on two 2-point clusters at distance 100") {
  Eigen::MatrixXd X(4, 2);
  X << 0, 0, 0, 1, 100, 0, 100, 1;
  auto cfg = make_config(Algorithm::KMeans,
                         {{"init", "kmeans++"}, {"metric", "euclidean"}, {"n_init", "10"},
                          {"max_iter", "500"}},
                         2);
  std::vector<int> truth = {0, 0, 1, 1};
  CHECK(clustering_accuracy(truth, fit_predict(cfg, X, 5)) == doctest::Approx(1.0));
}

TEST_CASE("kmeans separates well-separated blobs") {
  Dataset d = make_blobs(80, 2, 2, 50.0, 0.5, 7);
  auto cfg = make_config(Algorithm::KMeans,
                         {{"init", "kmeans++"}, {"metric", "euclidean"}, {"n_init", "10"},
                          {"max_iter", "500"}},
                         2);
  auto labels = fit_predict(cfg, d.X, 3);
  CHECK(clustering_accuracy(*d.y, labels) == doctest::Approx(1.0));
}

TEST_CASE("fit_predict is deterministic in (cfg, X, seed) for every algorithm") {
  Dataset d = make_blobs(40, 3, 3, 8.0, 1.0, 11);
  std::vector<AlgorithmConfig> cfgs;
  for (Algorithm a : algorithm_roster()) {
    Grid g = enumerate_grid(a);
    AlgorithmConfig cfg = g.configs[g.configs.size() / 2];
    if (takes_k(a)) cfg.k = 3;
    cfgs.push_back(cfg);
  }
  for (const auto& cfg : cfgs) {
    CAPTURE(to_string(cfg.algorithm));
    auto l1 = fit_predict(cfg, d.X, 12345);
    auto l2 = fit_predict(cfg, d.X, 12345);
    CHECK(l1 == l2);
    CHECK(is_valid_partition(l1));
  }
}

TEST_CASE("gmm log-likelihood is non-decreasing") {
  Dataset d = make_blobs(60, 3, 2, 6.0, 1.0, 13);
  for (auto cov : {detail::GmmCovariance::full, detail::GmmCovariance::spherical}) {
    std::vector<double> trace;
    detail::gmm(d.X, 3, cov, detail::GmmInit::kmeans, 5, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] >= trace[i - 1] - 1e-8);
  }
}

TEST_CASE("kernel kmeans with a linear kernel reproduces lloyd on small data") {
  Rng rng(29);
  Eigen::MatrixXd X(30, 2);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 2; ++j) X(i, j) = rng.normal();
  const int k = 3;

  Eigen::MatrixXd init_centers = X.topRows(k);
  KMeansResult km = detail::lloyd(X, init_centers, Metric::euclidean, 500);

  Eigen::MatrixXd gram = X * X.transpose();
  std::vector<int> init_labels(30);
  for (int i = 0; i < 30; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      double d2 = (X.row(i) - X.row(c)).squaredNorm();
      if (d2 < best) {
        best = d2;
        init_labels[static_cast<std::size_t>(i)] = c;
      }
    }
  }
  auto kk = detail::kernel_kmeans_run(gram, k, init_labels, 500);
  CHECK(ari(km.labels, kk) == doctest::Approx(1.0));
}

TEST_CASE("single linkage reproduces the MST cut on tiny instances") {
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 6 + static_cast<int>(rng.below(7));  // 6..12
    int k = 2 + static_cast<int>(rng.below(3));
    Eigen::MatrixXd X(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) X(i, j) = rng.normal();

    auto got = detail::agglomerative(X, Metric::euclidean, detail::Linkage::single, k);

    // brute-force MST (Prim), then cut the k-1 heaviest MST edges
    Eigen::MatrixXd D = pairwise_distance(X, Metric::euclidean);
    std::vector<bool> in_tree(static_cast<std::size_t>(n), false);
    std::vector<double> cost(static_cast<std::size_t>(n), 1e300);
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    cost[0] = 0;
    std::vector<std::tuple<double, int, int>> edges;
    for (int step = 0; step < n; ++step) {
      int u = -1;
      for (int i = 0; i < n; ++i)
        if (!in_tree[static_cast<std::size_t>(i)] && (u < 0 || cost[static_cast<std::size_t>(i)] < cost[static_cast<std::size_t>(u)])) u = i;
      in_tree[static_cast<std::size_t>(u)] = true;
      if (parent[static_cast<std::size_t>(u)] >= 0)
        edges.emplace_back(D(u, parent[static_cast<std::size_t>(u)]), u, parent[static_cast<std::size_t>(u)]);
      for (int v = 0; v < n; ++v) {
        if (!in_tree[static_cast<std::size_t>(v)] && D(u, v) < cost[static_cast<std::size_t>(v)]) {
          cost[static_cast<std::size_t>(v)] = D(u, v);
          parent[static_cast<std::size_t>(v)] = u;
        }
      }
    }
    std::sort(edges.begin(), edges.end());
    edges.resize(static_cast<std::size_t>(n - k));  // keep the n-k lightest
    std::vector<int> comp(static_cast<std::size_t>(n));
    std::iota(comp.begin(), comp.end(), 0);
    auto find = [&comp](int x) {
      while (comp[static_cast<std::size_t>(x)] != x) x = comp[static_cast<std::size_t>(x)];
      return x;
    };
    for (auto& [w, a, b] : edges) comp[static_cast<std::size_t>(find(a))] = find(b);
    std::vector<int> want(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) want[static_cast<std::size_t>(i)] = find(i);

    CHECK(ari(want, got) == doctest::Approx(1.0));
  }
}

TEST_CASE("dbscan marks everything noise when eps is tiny") {
  Dataset d = make_blobs(50, 2, 2, 5.0, 1.0, 17);
  auto cfg = make_config(Algorithm::DBSCAN,
                         {{"eps", "0.001"}, {"min_sample", "5"}, {"metric", "euclidean"}});
  auto labels = fit_predict(cfg, d.X, 1);
  CHECK(*std::max_element(labels.begin(), labels.end()) == 0);  // single noise cluster
}

TEST_CASE("dbscan recovers dense separated blobs") {
  Dataset d = make_blobs(100, 2, 2, 50.0, 0.3, 19);
  auto cfg = make_config(Algorithm::DBSCAN,
                         {{"eps", "0.2"}, {"min_sample", "5"}, {"metric", "euclidean"}});
  auto labels = fit_predict(cfg, d.X, 1);
  CHECK(clustering_accuracy(*d.y, labels) > 0.95);
}

TEST_CASE("spectral clustering separates rings where kmeans cannot") {
  Dataset d = make_rings(400, 1.0, 3.0, 0.05, 23);
  auto spe = make_config(Algorithm::SpeClu, {{"affinity", "knn"}, {"k", "10"}}, 2);
  auto km = make_config(Algorithm::KMeans,
                        {{"init", "kmeans++"}, {"metric", "euclidean"}, {"n_init", "10"},
                         {"max_iter", "500"}},
                        2);
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    CHECK(clustering_accuracy(*d.y, fit_predict(spe, d.X, seed)) == doctest::Approx(1.0));
    CHECK(clustering_accuracy(*d.y, fit_predict(km, d.X, seed)) <= 0.75);
  }
}

TEST_CASE("spectral affinities are symmetric and non-negative") {
  Dataset d = make_blobs(40, 2, 2, 4.0, 1.0, 29);
  Eigen::MatrixXd knn = detail::knn_affinity(d.X, 5);
  Eigen::MatrixXd rbf = detail::rbf_affinity(d.X, 0.5);
  CHECK(knn.isApprox(knn.transpose()));
  CHECK(rbf.isApprox(rbf.transpose()));
  CHECK(knn.minCoeff() >= 0.0);
  CHECK(rbf.minCoeff() >= 0.0);
  // union symmetrization keeps at least k neighbors per node
  for (int i = 0; i < knn.rows(); ++i) CHECK(knn.row(i).sum() >= 5.0);
}

TEST_CASE("gmm recovers overlapping anisotropic gaussians") {
  // two stretched gaussians with slight overlap; oracle is the generator
  Rng rng(31);
  const int n = 300;
  Eigen::MatrixXd X(n, 2);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int c = i % 2;
    double u = rng.normal() * 3.0;
    double v = rng.normal() * 0.4;
    double off = c == 0 ? -2.2 : 2.2;
    X(i, 0) = u;
    X(i, 1) = v + off;
    y[static_cast<std::size_t>(i)] = c;
  }
  auto cfg = make_config(Algorithm::GMM, {{"covariance_type", "full"}, {"init_params", "kmeans"}}, 2);
  double best = 0;
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull})
    best = std::max(best, clustering_accuracy(y, fit_predict(cfg, X, seed)));
  CHECK(best >= 0.9);
}

TEST_CASE("k-plane assignment never increases the projection residual") {
  Dataset d = make_blobs(60, 3, 4, 6.0, 1.0, 41);
  std::vector<double> trace;
  detail::k_plane(d.X, 3, 2, 7, &trace);
  REQUIRE(trace.size() >= 2);
  // trace alternates [after-refit, after-assign, ...]
  for (std::size_t i = 0; i + 1 < trace.size(); i += 2)
    CHECK(trace[i + 1] <= trace[i] + 1e-9);
}

TEST_CASE("ssc coefficients have a numerically zero diagonal") {
  Dataset d = make_blobs(40, 2, 3, 6.0, 0.8, 43);
  Eigen::MatrixXd C = detail::ssc_coefficients(d.X, 10.0);
  CHECK(C.diagonal().cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ssc admm reaches a lasso objective no worse than reference points") {
  Rng rng(61);
  const int n = 14, m = 6;
  Eigen::MatrixXd X(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) X(i, j) = rng.normal();
  const double lambda = 5.0;

  Eigen::MatrixXd C = detail::ssc_coefficients(X, lambda, 2000, 1e-8);
  auto objective = [&X, lambda](int i, const Eigen::VectorXd& c) {
    Eigen::VectorXd residual = X.row(i).transpose() - X.transpose() * c;
    return c.cwiseAbs().sum() + 0.5 * lambda * residual.squaredNorm();
  };
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd c = C.col(i);
    double f = objective(i, c);
    // no worse than the trivial solution
    CHECK(f <= objective(i, Eigen::VectorXd::Zero(n)) + 1e-6);
    // and locally optimal against random feasible perturbations (c_i stays 0)
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::VectorXd delta(n);
      for (int j = 0; j < n; ++j) delta(j) = 0.01 * rng.normal();
      delta(i) = 0.0;
      CHECK(f <= objective(i, c + delta) + 1e-6);
    }
  }
}

TEST_CASE("ssc on all-zero data fails as degenerate, never crashes") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(20, 3);
  auto cfg = make_config(Algorithm::SSC, {{"lambda", "1.0"}}, 2);
  CHECK_THROWS_AS(fit_predict(cfg, X, 1), ClusteringFailure);
}

TEST_CASE("birch respects the requested cluster budget") {
  Dataset d = make_blobs(120, 4, 2, 10.0, 0.5, 47);
  auto cfg = make_config(Algorithm::BIRCH, {{"threshold", "0.5"}, {"branching_factor", "50"}}, 4);
  auto labels = fit_predict(cfg, d.X, 1);
  CHECK(is_valid_partition(labels));
  int c = *std::max_element(labels.begin(), labels.end()) + 1;
  CHECK(c <= 4);
  CHECK(clustering_accuracy(*d.y, labels) == doctest::Approx(1.0));
}

TEST_CASE("mean shift finds separated modes") {
  Dataset d = make_blobs(90, 3, 2, 30.0, 0.5, 53);
  auto cfg = make_config(Algorithm::MeanShift, {{"bandwidth", "0.3"}, {"min_bin_freq", "1"}});
  auto labels = fit_predict(cfg, d.X, 1);
  CHECK(is_valid_partition(labels));
  CHECK(nmi(*d.y, labels) > 0.9);
}

TEST_CASE("invalid configurations are rejected up front") {
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(10, 2);
  auto no_k = make_config(Algorithm::KMeans,
                          {{"init", "kmeans++"}, {"metric", "euclidean"}});
  CHECK_THROWS_AS(fit_predict(no_k, X, 1), std::invalid_argument);
  auto bad_k = make_config(Algorithm::KMeans,
                           {{"init", "kmeans++"}, {"metric", "euclidean"}}, 11);
  CHECK_THROWS_AS(fit_predict(bad_k, X, 1), std::invalid_argument);
  auto bad_metric = make_config(Algorithm::KMeans,
                                {{"init", "kmeans++"}, {"metric", "chebyshev"}}, 2);
  CHECK_THROWS_AS(fit_predict(bad_metric, X, 1), std::invalid_argument);
}

TEST_CASE("config ids round-trip") {
  for (Algorithm a : algorithm_roster()) {
    Grid g = enumerate_grid(a);
    for (std::size_t i = 0; i < g.configs.size(); ++i) {
      AlgorithmConfig back = config_from_id(g.config_ids[i]);
      CHECK(config_id(back) == g.config_ids[i]);
      CHECK(back.algorithm == a);
    }
  }
}
