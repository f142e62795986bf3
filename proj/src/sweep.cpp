#include "clubench/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "clubench/csv.hpp"
#include "clubench/metrics.hpp"
#include "clubench/rng.hpp"

namespace clubench {

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& dataset,
                        const std::string& config_id, int repeat) {
  std::string key = dataset;
  key.push_back('\0');
  key += config_id;
  key.push_back('\0');
  key += std::to_string(repeat);
  return stable_hash64(key, base_seed);
}

namespace {

struct Task {
  const Dataset* dataset;
  AlgorithmConfig config;  // with K bound
  const std::string* config_id;
  int repeat;
};

RunResult run_cell(const Task& task, const SweepOptions& opts) {
  RunResult r;
  r.dataset = task.dataset->name;
  r.config_id = *task.config_id;
  r.repeat = task.repeat;
  r.seed = cell_seed(opts.base_seed, r.dataset, r.config_id, r.repeat);

  std::vector<int> labels;
  auto t0 = std::chrono::steady_clock::now();
  try {
    labels = fit_predict(task.config, task.dataset->X, r.seed);
    r.ok = true;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  auto t1 = std::chrono::steady_clock::now();
  r.time_s = std::chrono::duration<double>(t1 - t0).count();

  if (r.ok && task.dataset->y) {
    r.acc = clustering_accuracy(*task.dataset->y, labels);
    r.nmi = nmi(*task.dataset->y, labels);
    r.ari = ari(*task.dataset->y, labels);
  }
  if (r.ok && opts.keep_labels) r.labels = std::move(labels);
  return r;
}

}  // namespace

std::vector<RunResult> run_sweep(const std::vector<Dataset>& datasets,
                                 const std::vector<Grid>& grids, const SweepOptions& opts) {
  if (opts.repeats < 1) throw std::invalid_argument("repeats must be >= 1");

  std::vector<Task> tasks;
  for (const auto& d : datasets) {
    for (const auto& g : grids) {
      for (std::size_t c = 0; c < g.configs.size(); ++c) {
        for (int rep = 0; rep < opts.repeats; ++rep) {
          Task t;
          t.dataset = &d;
          t.config = g.configs[c];
          if (takes_k(g.algorithm)) t.config.k = d.K;
          t.config_id = &g.config_ids[c];
          t.repeat = rep;
          tasks.push_back(std::move(t));
        }
      }
    }
  }

  std::vector<RunResult> results(tasks.size());
  const int workers = std::max(1, opts.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = run_cell(tasks[i], opts);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        results[i] = run_cell(tasks[i], opts);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

namespace {

std::string opt_field(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

}  // namespace

void write_results_csv(const std::string& path, const std::vector<RunResult>& results) {
  csv::Table t;
  t.header = {"dataset", "config_id", "repeat", "seed", "acc", "nmi", "ari", "time_s"};
  t.rows.reserve(results.size());
  for (const auto& r : results) {
    t.rows.push_back({r.dataset, r.config_id, std::to_string(r.repeat), std::to_string(r.seed),
                      opt_field(r.acc), opt_field(r.nmi), opt_field(r.ari),
                      csv::format_double(r.time_s)});
  }
  csv::write(path, t);
}

std::vector<RunResult> read_results_csv(const std::string& path) {
  csv::Table t = csv::read(path);
  const std::vector<std::string> expected = {"dataset", "config_id", "repeat", "seed",
                                             "acc",     "nmi",       "ari",    "time_s"};
  if (t.header != expected) throw std::runtime_error("unexpected results header in " + path);
  std::vector<RunResult> out;
  out.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    RunResult r;
    r.dataset = row[0];
    r.config_id = row[1];
    r.repeat = std::stoi(row[2]);
    r.seed = std::stoull(row[3]);
    if (auto v = csv::parse_double(row[4])) r.acc = *v;
    if (auto v = csv::parse_double(row[5])) r.nmi = *v;
    if (auto v = csv::parse_double(row[6])) r.ari = *v;
    if (auto v = csv::parse_double(row[7])) r.time_s = *v;
    r.ok = r.acc.has_value() || r.nmi.has_value() || r.ari.has_value();
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

struct CellKey {
  std::string dataset;
  std::string config;
  bool operator<(const CellKey& o) const {
    if (dataset != o.dataset) return dataset < o.dataset;
    return config < o.config;
  }
};

struct CellAgg {
  double sum[3] = {0, 0, 0};
  int count[3] = {0, 0, 0};
  void add(const RunResult& r) {
    const std::optional<double>* vals[3] = {&r.acc, &r.nmi, &r.ari};
    for (int m = 0; m < 3; ++m) {
      if (*vals[m]) {
        sum[m] += **vals[m];
        count[m]++;
      }
    }
  }
  std::optional<double> mean(int m) const {
    if (count[m] == 0) return std::nullopt;
    return sum[m] / count[m];
  }
};

}  // namespace

SummaryTable summarize(const std::vector<RunResult>& results, SummaryMode mode,
                       const std::vector<Grid>& grids) {
  if (results.empty()) throw std::invalid_argument("summarize: empty result list");

  // repeat cells averaged first
  std::map<CellKey, CellAgg> cells;
  std::set<std::string> datasets;
  for (const auto& r : results) {
    cells[{r.dataset, r.config_id}].add(r);
    datasets.insert(r.dataset);
  }

  SummaryTable table;
  for (const auto& g : grids) {
    const std::string algo = to_string(g.algorithm);
    double total[3] = {0, 0, 0};
    int count[3] = {0, 0, 0};
    for (const auto& ds : datasets) {
      std::optional<double> value[3];
      if (mode == SummaryMode::default_config) {
        auto it = cells.find({ds, g.config_ids[static_cast<std::size_t>(g.default_index)]});
        if (it != cells.end())
          for (int m = 0; m < 3; ++m) value[m] = it->second.mean(m);
      } else {
        for (const auto& id : g.config_ids) {
          auto it = cells.find({ds, id});
          if (it == cells.end()) continue;
          for (int m = 0; m < 3; ++m) {
            auto v = it->second.mean(m);
            if (v && (!value[m] || *v > *value[m])) value[m] = v;
          }
        }
      }
      for (int m = 0; m < 3; ++m) {
        if (value[m]) {
          total[m] += *value[m];
          count[m]++;
        }
      }
    }
    if (count[0] + count[1] + count[2] == 0) {
      table.warnings.push_back("algorithm " + algo + " has no observed cells; omitted");
      continue;
    }
    SummaryRow row;
    row.algorithm = algo;
    if (count[0]) row.acc = total[0] / count[0];
    if (count[1]) row.nmi = total[1] / count[1];
    if (count[2]) row.ari = total[2] / count[2];
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace clubench
