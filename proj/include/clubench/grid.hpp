#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "clubench/algorithms.hpp"

namespace clubench {

// The enumerated hyperparameter grid of one algorithm, in a stable order
// (lexicographic product of the grid rows, blocks concatenated).
struct Grid {
  Algorithm algorithm = Algorithm::KMeans;
  std::vector<AlgorithmConfig> configs;
  std::vector<std::string> config_ids;
  int default_index = 0;

  const AlgorithmConfig& default_config() const { return configs[static_cast<std::size_t>(default_index)]; }
};

// Full built-in search grid for one algorithm. Counts per algorithm:
// KMeans 6, KernelKMeans 10, AggClu 9, DBSCAN 90, BIRCH 12, GMM 6,
// SpeClu 11, MeanShift 12, kPC 5, SSC 5 (166 total).
Grid enumerate_grid(Algorithm a);

std::vector<Grid> enumerate_grids(const std::vector<Algorithm>& algos);

// Override file: {"algorithm": "...", "rows": {"param": [values...]},
// "default_index": 0}. Unlisted parameters keep their built-in values;
// enumeration order stays the built-in row order.
Grid grid_from_json(const nlohmann::json& j);

}  // namespace clubench
