#include "clubench/grid.hpp"

#include <map>
#include <stdexcept>

namespace clubench {

namespace {

struct GridRow {
  std::string name;
  std::vector<ParamValue> values;
};

// One block is a cartesian product of its rows; an algorithm's grid is the
// concatenation of its blocks (SpeClu has one block per affinity family).
using GridBlock = std::vector<GridRow>;

std::vector<ParamValue> reals(std::initializer_list<double> vs) {
  std::vector<ParamValue> out;
  for (double v : vs) out.push_back(ParamValue::real(v));
  return out;
}

std::vector<ParamValue> ints(std::initializer_list<long> vs) {
  std::vector<ParamValue> out;
  for (long v : vs) out.push_back(ParamValue::integer(v));
  return out;
}

std::vector<ParamValue> strs(std::initializer_list<const char*> vs) {
  std::vector<ParamValue> out;
  for (const char* v : vs) out.push_back(ParamValue::str(v));
  return out;
}

std::vector<GridBlock> blocks_for(Algorithm a) {
  switch (a) {
    case Algorithm::KMeans:
      return {{{"init", strs({"kmeans++", "random"})},
               {"metric", strs({"euclidean", "manhattan", "cosine"})},
               {"n_init", ints({10})},
               {"max_iter", ints({500})}}};
    case Algorithm::KernelKMeans:
      return {{{"kernel", strs({"rbf"})},
               {"gamma", reals({0.01, 0.1, 1.0, 10.0, 100.0})},
               {"init", strs({"kmeans++", "random"})},
               {"metric", strs({"euclidean"})},
               {"max_iter", ints({500})}}};
    case Algorithm::AggClu:
      return {{{"metric", strs({"euclidean", "manhattan", "cosine"})},
               {"linkage", strs({"average", "complete", "single"})}}};
    case Algorithm::DBSCAN:
      return {{{"eps", reals({0.001, 0.005, 0.01, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 10.0})},
               {"min_sample", ints({3, 5, 10})},
               {"metric", strs({"euclidean", "manhattan", "cosine"})}}};
    case Algorithm::BIRCH:
      return {{{"threshold", reals({0.3, 0.5, 0.7, 0.9})},
               {"branching_factor", ints({30, 50, 70})}}};
    case Algorithm::GMM:
      return {{{"covariance_type", strs({"full", "spherical"})},
               {"init_params", strs({"kmeans", "kmeans++", "random"})}}};
    case Algorithm::SpeClu:
      return {{{"affinity", strs({"knn"})}, {"k", ints({3, 5, 10, 20, 30, 50})}},
              {{"affinity", strs({"rbf"})}, {"gamma", reals({0.1, 0.5, 1.0, 5.0, 10.0})}}};
    case Algorithm::MeanShift:
      return {{{"bandwidth", reals({0.1, 0.3, 0.5, 0.7})},
               {"min_bin_freq", ints({1, 3, 5})}}};
    case Algorithm::kPC:
      return {{{"init_type", strs({"k-means"})}, {"d", ints({5, 10, 20, 30, 50})}}};
    case Algorithm::SSC:
      return {{{"lambda", reals({100.0, 10.0, 1.0, 0.1, 0.01})}}};
  }
  throw std::invalid_argument("unknown algorithm");
}

void expand_block(Algorithm a, const GridBlock& block, std::vector<AlgorithmConfig>& out) {
  std::vector<std::size_t> idx(block.size(), 0);
  for (;;) {
    AlgorithmConfig cfg;
    cfg.algorithm = a;
    for (std::size_t r = 0; r < block.size(); ++r)
      cfg.params.emplace_back(block[r].name, block[r].values[idx[r]]);
    out.push_back(std::move(cfg));
    // advance the rightmost row fastest (lexicographic product)
    std::size_t r = block.size();
    while (r > 0) {
      --r;
      if (++idx[r] < block[r].values.size()) break;
      idx[r] = 0;
      if (r == 0) return;
    }
    if (r == 0 && idx[0] == 0) return;
  }
}

Grid build(Algorithm a, const std::vector<GridBlock>& blocks, int default_index) {
  Grid g;
  g.algorithm = a;
  for (const auto& block : blocks) expand_block(a, block, g.configs);
  g.config_ids.reserve(g.configs.size());
  for (const auto& cfg : g.configs) g.config_ids.push_back(config_id(cfg));
  if (default_index < 0 || default_index >= static_cast<int>(g.configs.size()))
    throw std::invalid_argument("default_index out of range");
  g.default_index = default_index;
  return g;
}

}  // namespace

Grid enumerate_grid(Algorithm a) { return build(a, blocks_for(a), 0); }

std::vector<Grid> enumerate_grids(const std::vector<Algorithm>& algos) {
  std::vector<Grid> out;
  out.reserve(algos.size());
  for (Algorithm a : algos) out.push_back(enumerate_grid(a));
  return out;
}

Grid grid_from_json(const nlohmann::json& j) {
  Algorithm a = algorithm_from_string(j.at("algorithm").get<std::string>());
  std::vector<GridBlock> blocks = blocks_for(a);
  if (j.contains("rows")) {
    for (const auto& [name, values] : j.at("rows").items()) {
      bool found = false;
      for (auto& block : blocks) {
        for (auto& row : block) {
          if (row.name != name) continue;
          found = true;
          row.values.clear();
          for (const auto& v : values) {
            if (v.is_string())
              row.values.push_back(ParamValue::str(v.get<std::string>()));
            else if (v.is_number_integer() || v.is_number_unsigned())
              row.values.push_back(ParamValue::integer(v.get<long>()));
            else
              row.values.push_back(ParamValue::real(v.get<double>()));
          }
          if (row.values.empty()) throw std::invalid_argument("empty value list for " + name);
        }
      }
      if (!found) throw std::invalid_argument("unknown grid parameter: " + name);
    }
  }
  return build(a, blocks, j.value("default_index", 0));
}

}  // namespace clubench
