#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clubench/dataset.hpp"
#include "clubench/grid.hpp"

namespace clubench {

// One (dataset, config, repeat) cell. Failed runs keep ok=false with the
// error message; their metrics stay missing and downstream treats the cell
// as unobserved.
struct RunResult {
  std::string dataset;
  std::string config_id;
  int repeat = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::optional<double> acc, nmi, ari;
  double time_s = 0.0;
  std::optional<std::vector<int>> labels;
};

struct SweepOptions {
  int repeats = 5;
  std::uint64_t base_seed = 0;
  int workers = 1;
  bool keep_labels = false;
};

// Runs every (dataset x config x repeat) cell. The result order and content
// are independent of the worker count; each cell's seed is a stable hash of
// (base_seed, dataset name, config id, repeat).
std::vector<RunResult> run_sweep(const std::vector<Dataset>& datasets,
                                 const std::vector<Grid>& grids, const SweepOptions& opts);

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& dataset,
                        const std::string& config_id, int repeat);

// CSV columns: dataset,config_id,repeat,seed,acc,nmi,ari,time_s. Missing
// metrics are empty fields.
void write_results_csv(const std::string& path, const std::vector<RunResult>& results);
std::vector<RunResult> read_results_csv(const std::string& path);

enum class SummaryMode { default_config, best };

struct SummaryRow {
  std::string algorithm;
  std::optional<double> acc, nmi, ari;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  std::vector<std::string> warnings;  // algorithms omitted for having no data
};

// Repeat cells are averaged first; "best" takes the per-dataset maximum over
// the algorithm's configs independently per metric, then means over datasets.
SummaryTable summarize(const std::vector<RunResult>& results, SummaryMode mode,
                       const std::vector<Grid>& grids);

}  // namespace clubench
