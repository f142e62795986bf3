#include <doctest.h>

#include <cmath>

#include "clubench/dataset.hpp"
#include "clubench/demo.hpp"
#include "clubench/metafeat.hpp"
#include "clubench/rng.hpp"

using namespace clubench;

namespace {

Dataset gaussian_dataset(int n, int m, std::uint64_t seed) {
  Dataset d;
  d.name = "gauss";
  d.X.resize(n, m);
  Rng rng(seed);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) d.X(i, j) = rng.normal();
  return d;
}

bool all_finite(const MetaVector& mv) {
  for (double v : mv.values)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

TEST_CASE("manifest and vector lengths always agree") {
  Dataset d = gaussian_dataset(50, 4, 1);
  MetaVector mv = meta_vector(d, 7);
  CHECK(mv.values.size() == mv.manifest.size());
  CHECK(all_finite(mv));
}

TEST_CASE("landmarker block is exactly 130 coordinates") {
  Dataset d = gaussian_dataset(60, 3, 2);
  MetaVector lm = landmarker_features(d, default_landmark_ks(), 5);
  CHECK(lm.values.size() == 130);
  for (const auto& c : lm.manifest) CHECK(c.formula_tag == "landmarker_kmeans");
}

TEST_CASE("standardized data pins the mean and std aggregates") {
  Dataset d = preprocess(gaussian_dataset(80, 5, 3), true);
  MetaVector mv = statistical_features(d, 11);
  auto value_of = [&mv](const std::string& name) {
    for (std::size_t i = 0; i < mv.manifest.size(); ++i)
      if (mv.manifest[i].name == name) return mv.values[i];
    FAIL("missing coordinate ", name);
    return 0.0;
  };
  CHECK(value_of("sample_mean") == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(value_of("sample_std") == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(value_of("n") == 80);
  CHECK(value_of("p") == 5);
}

TEST_CASE("two identical features give max off-diagonal correlation 1") {
  Dataset d = gaussian_dataset(40, 1, 4);
  d.X.conservativeResize(40, 2);
  d.X.col(1) = d.X.col(0);
  MetaVector mv = statistical_features(d, 1);
  for (std::size_t i = 0; i < mv.manifest.size(); ++i)
    if (mv.manifest[i].name == "correlation_max")
      CHECK(mv.values[i] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("single-feature dataset imputes the correlation block") {
  Dataset d = gaussian_dataset(30, 1, 5);
  MetaVector mv = statistical_features(d, 1);
  bool found = false;
  for (std::size_t i = 0; i < mv.manifest.size(); ++i) {
    if (mv.manifest[i].name.rfind("correlation_", 0) == 0) {
      found = true;
      CHECK(mv.values[i] == 0.0);
      CHECK(mv.manifest[i].imputed);
    }
  }
  CHECK(found);
  CHECK(all_finite(mv));
}

TEST_CASE("four tight blobs explain nearly all variance at K=4") {
  Dataset d = make_blobs(40, 4, 2, 30.0, 0.01, 6);
  MetaVector lm = landmarker_features(d, {4}, 3);
  for (std::size_t i = 0; i < lm.manifest.size(); ++i)
    if (lm.manifest[i].name == "landmark_k4_sse_explained_ratio")
      CHECK(lm.values[i] > 0.99);
}

TEST_CASE("landmarker is deterministic and row-order invariant") {
  Dataset d = make_blobs(50, 3, 3, 8.0, 1.0, 7);
  MetaVector a = landmarker_features(d, default_landmark_ks(), 9);
  MetaVector b = landmarker_features(d, default_landmark_ks(), 9);
  CHECK(a.values == b.values);

  // permute rows; the sorted-canonical ordering must erase the difference
  Dataset shuffled = d;
  Rng rng(8);
  std::vector<int> perm(static_cast<std::size_t>(d.n()));
  for (int i = 0; i < d.n(); ++i) perm[static_cast<std::size_t>(i)] = i;
  rng.shuffle(perm);
  for (int i = 0; i < d.n(); ++i) shuffled.X.row(i) = d.X.row(perm[static_cast<std::size_t>(i)]);
  MetaVector c = landmarker_features(shuffled, default_landmark_ks(), 9);
  for (std::size_t i = 0; i < a.values.size(); ++i)
    CHECK(c.values[i] == doctest::Approx(a.values[i]).epsilon(1e-12));
}

TEST_CASE("statistical block is row-order invariant") {
  Dataset d = gaussian_dataset(45, 4, 10);
  MetaVector a = statistical_features(d, 13);
  Dataset shuffled = d;
  Rng rng(14);
  std::vector<int> perm(static_cast<std::size_t>(d.n()));
  for (int i = 0; i < d.n(); ++i) perm[static_cast<std::size_t>(i)] = i;
  rng.shuffle(perm);
  for (int i = 0; i < d.n(); ++i) shuffled.X.row(i) = d.X.row(perm[static_cast<std::size_t>(i)]);
  MetaVector b = statistical_features(shuffled, 13);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    CHECK(b.values[i] == doctest::Approx(a.values[i]).epsilon(1e-9));
}

TEST_CASE("small n skips oversized landmark Ks with flags, no NaN") {
  Dataset d = gaussian_dataset(5, 2, 15);
  MetaVector lm = landmarker_features(d, default_landmark_ks(), 3);
  CHECK(lm.values.size() == 130);
  CHECK(all_finite(lm));
  int flagged = 0;
  for (const auto& c : lm.manifest)
    if (c.imputed) ++flagged;
  CHECK(flagged >= 13 * 8);  // K=6..20 unusable at n=5
}

TEST_CASE("degenerate fuzz corpus never leaks NaN") {
  Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 3 + static_cast<int>(rng.below(20));
    int m = 1 + static_cast<int>(rng.below(4));
    Dataset d;
    d.name = "fuzz";
    d.X.resize(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        switch (rng.below(4)) {
          case 0: d.X(i, j) = 0.0; break;                        // constant block
          case 1: d.X(i, j) = 1e9 * rng.uniform(); break;        // huge
          case 2: d.X(i, j) = 1e-9 * rng.normal(); break;        // tiny
          default: d.X(i, j) = rng.normal(); break;
        }
      }
    if (trial % 3 == 0) d.X.col(0).setConstant(4.2);             // constant feature
    if (trial % 4 == 0 && n >= 2) d.X.row(1) = d.X.row(0);       // duplicate rows
    MetaVector mv = meta_vector(d, trial);
    CHECK(mv.values.size() == mv.manifest.size());
    CHECK(all_finite(mv));
  }
}

TEST_CASE("landmark SSE total is non-increasing in K on a shared dataset") {
  Dataset d = make_blobs(80, 4, 2, 6.0, 1.2, 21);
  MetaVector lm = landmarker_features(d, default_landmark_ks(), 17);
  std::vector<double> sse;
  for (std::size_t i = 0; i < lm.manifest.size(); ++i)
    if (lm.manifest[i].name.find("_sse_total") != std::string::npos)
      sse.push_back(lm.values[i]);
  REQUIRE(sse.size() == 10);
  for (std::size_t i = 1; i < sse.size(); ++i) CHECK(sse[i] <= sse[i - 1] + 1e-9);
}

TEST_CASE("meta csv and manifest exports agree") {
  Dataset d = gaussian_dataset(30, 3, 22);
  MetaVector mv = meta_vector(d, 1);
  nlohmann::json j = manifest_json(mv.manifest);
  CHECK(j.size() == mv.manifest.size());
  CHECK(j[0]["name"] == "n");
}
