#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "clubench/dataset.hpp"

namespace clubench {

struct MetaCoordinate {
  std::string name;
  std::string formula_tag;
  bool imputed = false;          // a degenerate formula was mapped to 0
  bool order_sensitive = false;  // value could depend on row order (none should)
};

// Fixed-order meta-feature vector; the manifest names every coordinate and is
// the authoritative contract for its length and order.
struct MetaVector {
  std::vector<double> values;
  std::vector<MetaCoordinate> manifest;

  std::size_t size() const { return values.size(); }
  void append(const MetaVector& other);
};

// Statistical descriptor block: size features, per-feature distribution
// statistics with fixed aggregations, correlation/covariance/sparsity/ANOVA
// blocks and normalized entropy. Degenerate formulas impute 0 and set the
// manifest flag; no NaN/Inf ever leaves.
MetaVector statistical_features(const Dataset& d, std::uint64_t seed);

inline std::vector<int> default_landmark_ks() { return {2, 4, 6, 8, 10, 12, 14, 16, 18, 20}; }

// KMeans landmarker block: for each K, thirteen internal metrics of the
// (kmeans++, euclidean, n_init=10) partition, K-major metric-minor; always
// 13 * |K_set| coordinates, with unusable K values imputed and flagged.
MetaVector landmarker_features(const Dataset& d, const std::vector<int>& k_set,
                               std::uint64_t seed);

// statistical block followed by the landmarker block
MetaVector meta_vector(const Dataset& d, std::uint64_t seed);

nlohmann::json manifest_json(const std::vector<MetaCoordinate>& manifest);

void write_meta_csv(const std::string& path, const std::vector<std::string>& dataset_names,
                    const std::vector<MetaVector>& vectors);

}  // namespace clubench
