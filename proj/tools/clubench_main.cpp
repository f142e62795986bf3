// clubench: clustering benchmark pipeline over CSV datasets.
// Subcommands emit files under --out and print a one-line JSON status.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "clubench/csv.hpp"
#include "clubench/dataset.hpp"
#include "clubench/demo.hpp"
#include "clubench/metafeat.hpp"
#include "clubench/perfmatrix.hpp"
#include "clubench/rng.hpp"
#include "clubench/selector.hpp"
#include "clubench/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace clubench;

namespace {

// flag-value problems exit 1; runtime problems exit 2
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CLUBENCH_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw UsageError("CLUBENCH_SEED is not an integer");
    }
  }
  return 0;
}

fs::path ensure_out_dir(const std::string& out) {
  if (out.empty()) throw UsageError("--out is required");
  fs::path p(out);
  fs::create_directories(p);
  return p;
}

void print_status(const std::string& command, const std::vector<std::string>& outputs,
                  json extra = json::object()) {
  json status;
  status["command"] = command;
  status["status"] = "ok";
  status["outputs"] = outputs;
  for (auto& [k, v] : extra.items()) status[k] = v;
  std::cout << status.dump() << std::endl;
}

std::vector<Dataset> load_data_dir(const std::string& dir, bool standardize, int cap,
                                   std::uint64_t seed) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no .csv datasets in " + dir);
  std::vector<Dataset> out;
  for (const auto& f : files) {
    Dataset d = load_csv(f.string());
    out.push_back(preprocess(d, standardize, cap, stable_hash64(d.name, seed)));
  }
  return out;
}

std::vector<Algorithm> parse_algos(const std::string& list) {
  if (list.empty() || list == "all") return algorithm_roster();
  std::vector<Algorithm> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string::npos) comma = list.size();
    std::string name = list.substr(pos, comma - pos);
    if (!name.empty()) {
      try {
        out.push_back(algorithm_from_string(name));
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
    }
    pos = comma + 1;
  }
  if (out.empty()) throw UsageError("--algos parsed to an empty list");
  return out;
}

std::vector<double> parse_doubles(const std::string& list) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t comma = list.find(',', pos);
    if (comma == std::string::npos) comma = list.size();
    std::string item = list.substr(pos, comma - pos);
    if (!item.empty()) {
      auto v = csv::parse_double(item);
      if (!v) throw UsageError("not a number: " + item);
      out.push_back(*v);
    }
    pos = comma + 1;
  }
  return out;
}

std::string fmt(double v) { return csv::format_double(v); }

std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

// ---- subcommand bodies ----

int cmd_demo(const std::string& out, std::uint64_t seed, int count, int samples) {
  fs::path dir = ensure_out_dir(out);
  auto datasets = make_demo_datasets(count, samples, seed);
  std::vector<std::string> written;
  for (const auto& d : datasets) {
    fs::path p = dir / (d.name + ".csv");
    save_csv(p.string(), d);
    written.push_back(p.string());
  }
  print_status("demo", written, {{"datasets", datasets.size()}, {"seed", seed}});
  return 0;
}

int cmd_sweep(const std::string& data, const std::string& out, const std::string& algos,
              int repeats, std::uint64_t seed, int workers, bool standardize, int cap,
              const std::string& grid_json_path) {
  if (repeats < 1) throw UsageError("--repeats must be >= 1");
  if (workers < 1) throw UsageError("--workers must be >= 1");
  fs::path dir = ensure_out_dir(out);

  auto datasets = load_data_dir(data, standardize, cap, seed);
  std::vector<Grid> grids = enumerate_grids(parse_algos(algos));
  if (!grid_json_path.empty()) {
    std::ifstream in(grid_json_path);
    if (!in) throw std::runtime_error("cannot open grid json: " + grid_json_path);
    json spec = json::parse(in);
    auto apply = [&grids](const json& one) {
      Grid g = grid_from_json(one);
      for (auto& existing : grids) {
        if (existing.algorithm == g.algorithm) {
          existing = g;
          return;
        }
      }
      grids.push_back(std::move(g));
    };
    if (spec.is_array())
      for (const auto& one : spec) apply(one);
    else
      apply(spec);
  }

  SweepOptions opts;
  opts.repeats = repeats;
  opts.base_seed = seed;
  opts.workers = workers;
  auto results = run_sweep(datasets, grids, opts);

  fs::path results_path = dir / "results.csv";
  write_results_csv(results_path.string(), results);

  // wall-clock metadata lives in the sidecar, outside the byte-stable outputs
  json meta;
  meta["command"] = "sweep";
  meta["seed"] = seed;
  meta["repeats"] = repeats;
  meta["workers"] = workers;
  meta["repeat_reducer"] = "mean";
  meta["eps_unit"] = "multiples of eps_base (mean pairwise distance)";
  meta["bandwidth_unit"] = "multiples of eps_base";
  meta["birch_threshold_unit"] = "multiples of eps_base";
  double total_time = 0.0;
  int failures = 0;
  for (const auto& r : results) {
    total_time += r.time_s;
    if (!r.ok) ++failures;
  }
  meta["total_fit_seconds"] = total_time;
  meta["failed_cells"] = failures;
  fs::path meta_path = dir / "results.meta.json";
  std::ofstream(meta_path) << meta.dump(2) << '\n';

  print_status("sweep", {results_path.string(), meta_path.string()},
               {{"cells", results.size()}, {"failed_cells", failures}});
  return 0;
}

int cmd_summarize(const std::string& results_path, const std::string& out) {
  fs::path dir = ensure_out_dir(out);
  auto results = read_results_csv(results_path);

  std::set<std::string> algos_present;
  for (const auto& r : results) algos_present.insert(algorithm_of_config_id(r.config_id));
  std::vector<Algorithm> algos;
  for (Algorithm a : algorithm_roster())
    if (algos_present.count(to_string(a))) algos.push_back(a);
  std::vector<Grid> grids = enumerate_grids(algos);

  SummaryTable def = summarize(results, SummaryMode::default_config, grids);
  SummaryTable best = summarize(results, SummaryMode::best, grids);

  csv::Table t;
  t.header = {"algorithm", "acc_default", "acc_best", "acc_delta", "nmi_default", "nmi_best",
              "nmi_delta", "ari_default", "ari_best", "ari_delta"};
  for (std::size_t i = 0; i < best.rows.size(); ++i) {
    const SummaryRow* d = nullptr;
    for (const auto& row : def.rows)
      if (row.algorithm == best.rows[i].algorithm) d = &row;
    auto delta = [](const std::optional<double>& b, const SummaryRow* drow,
                    std::optional<double> SummaryRow::* member) -> std::string {
      if (!b || !drow || !((*drow).*member)) return "";
      return csv::format_double(*b - *((*drow).*member));
    };
    t.rows.push_back({best.rows[i].algorithm,
                      d ? opt_fmt(d->acc) : "", opt_fmt(best.rows[i].acc),
                      delta(best.rows[i].acc, d, &SummaryRow::acc),
                      d ? opt_fmt(d->nmi) : "", opt_fmt(best.rows[i].nmi),
                      delta(best.rows[i].nmi, d, &SummaryRow::nmi),
                      d ? opt_fmt(d->ari) : "", opt_fmt(best.rows[i].ari),
                      delta(best.rows[i].ari, d, &SummaryRow::ari)});
  }
  fs::path path = dir / "summary.csv";
  csv::write(path.string(), t);
  for (const auto& w : best.warnings) std::cerr << "warning: " << w << '\n';
  print_status("summarize", {path.string()});
  return 0;
}

int cmd_matrix(const std::string& results_path, const std::string& metric,
               const std::string& out) {
  fs::path dir = ensure_out_dir(out);
  MetricKind kind = metric_kind_from_string(metric);
  auto results = read_results_csv(results_path);
  PerformanceMatrix pm = build_matrix(results, kind);
  fs::path path = dir / ("matrix_" + metric + ".csv");
  write_matrix_csv(path.string(), pm);
  print_status("matrix", {path.string()},
               {{"rows", pm.rows()}, {"cols", pm.cols()}, {"metric", metric}});
  return 0;
}

Eigen::MatrixXd require_dense(const PerformanceMatrix& pm) {
  if (!pm.observed.all())
    throw std::runtime_error("matrix has unobserved entries; complete or filter it first");
  return pm.P;
}

int cmd_ccr(const std::string& matrix_path, int j, const std::string& out) {
  PerformanceMatrix pm = read_matrix_csv(matrix_path, MetricKind::acc);
  Eigen::MatrixXd P = require_dense(pm);
  if (j < 1 || j > std::min(pm.rows(), pm.cols()))
    throw UsageError("--j must be in [1, min(rows, cols)]");
  double value = ccr(P, j);
  json res;
  res["j"] = j;
  res["ccr"] = value;
  std::vector<std::string> outputs;
  if (!out.empty()) {
    fs::path dir = ensure_out_dir(out);
    fs::path path = dir / "ccr.json";
    std::ofstream(path) << res.dump(2) << '\n';
    outputs.push_back(path.string());
  }
  print_status("ccr", outputs, res);
  return 0;
}

int cmd_complete(const std::string& matrix_path, const std::string& mr_list, int rank, int seeds,
                 std::uint64_t seed, const std::string& metric, int iters, double tol,
                 const std::string& out) {
  auto mrs = parse_doubles(mr_list);
  if (mrs.empty()) throw UsageError("--mr is required");
  for (double mr : mrs)
    if (!(mr > 0.0 && mr < 1.0)) throw UsageError("mr must be in (0,1)");
  if (seeds < 1) throw UsageError("--seeds must be >= 1");
  fs::path dir = ensure_out_dir(out);

  MetricKind kind = metric_kind_from_string(metric);
  PerformanceMatrix pm = read_matrix_csv(matrix_path, kind);
  Eigen::MatrixXd P = require_dense(pm);
  if (rank < 1 || rank > std::min(pm.rows(), pm.cols()))
    throw UsageError("--rank must be in [1, min(rows, cols)]");

  json rows = json::array();
  for (double mr : mrs) {
    CompletionReport rep =
        completion_experiment(P, mr, rank, seeds, seed, metric_range(kind), iters, tol);
    json row;
    row["mr"] = rep.mr;
    row["r"] = rep.r;
    row["iters"] = iters;
    row["seeds"] = rep.seeds;
    row["mape_mean"] = rep.mape_mean;
    row["mape_std"] = rep.mape_std;
    row["mapes"] = rep.mapes;
    rows.push_back(std::move(row));
  }
  json doc;
  doc["metric"] = metric;
  doc["seed"] = seed;
  doc["results"] = rows;
  fs::path path = dir / "completion.json";
  std::ofstream(path) << doc.dump(2) << '\n';
  print_status("complete", {path.string()}, {{"rows", rows.size()}});
  return 0;
}

int cmd_metafeat(const std::string& data, const std::string& out, std::uint64_t seed,
                 bool standardize, int cap) {
  fs::path dir = ensure_out_dir(out);
  auto datasets = load_data_dir(data, standardize, cap, seed);
  std::vector<std::string> names;
  std::vector<MetaVector> vectors;
  for (const auto& d : datasets) {
    names.push_back(d.name);
    vectors.push_back(meta_vector(d, stable_hash64(d.name + "/meta", seed)));
  }
  fs::path meta_path = dir / "meta.csv";
  write_meta_csv(meta_path.string(), names, vectors);
  fs::path manifest_path = dir / "meta_manifest.json";
  std::ofstream(manifest_path) << manifest_json(vectors.front().manifest).dump(2) << '\n';
  print_status("metafeat", {meta_path.string(), manifest_path.string()},
               {{"datasets", names.size()}, {"dimensions", vectors.front().size()}});
  return 0;
}

int cmd_select(const std::string& meta_path, const std::string& matrices, int folds,
               std::uint64_t seed, int trees, const std::string& out) {
  if (folds < 2) throw UsageError("--folds must be >= 2");
  if (trees < 1) throw UsageError("--trees must be >= 1");
  fs::path dir = ensure_out_dir(out);

  // meta.csv: dataset name + feature columns
  csv::Table meta = csv::read(meta_path);
  if (meta.header.empty() || meta.header[0] != "dataset")
    throw std::runtime_error("meta csv must start with a dataset column");
  std::vector<std::string> feature_names(meta.header.begin() + 1, meta.header.end());

  auto paths = [&matrices]() {
    std::vector<std::string> out_paths;
    std::size_t pos = 0;
    while (pos <= matrices.size()) {
      std::size_t comma = matrices.find(',', pos);
      if (comma == std::string::npos) comma = matrices.size();
      out_paths.push_back(matrices.substr(pos, comma - pos));
      pos = comma + 1;
    }
    return out_paths;
  }();
  if (paths.size() != 3) throw UsageError("--matrices needs exactly 3 paths (acc,nmi,ari)");
  PerformanceMatrix pms[3] = {read_matrix_csv(paths[0], MetricKind::acc),
                              read_matrix_csv(paths[1], MetricKind::nmi),
                              read_matrix_csv(paths[2], MetricKind::ari)};

  // align rows: meta rows define the order; all matrices must cover them
  std::map<std::string, int> meta_row;
  for (std::size_t i = 0; i < meta.rows.size(); ++i) meta_row[meta.rows[i][0]] = static_cast<int>(i);
  for (auto& pm : pms) {
    std::map<std::string, int> have;
    for (std::size_t i = 0; i < pm.row_names.size(); ++i) have[pm.row_names[i]] = static_cast<int>(i);
    Eigen::MatrixXd P(meta.rows.size(), pm.cols());
    Mask observed(meta.rows.size(), pm.cols());
    std::vector<std::string> row_names;
    for (std::size_t i = 0; i < meta.rows.size(); ++i) {
      auto it = have.find(meta.rows[i][0]);
      if (it == have.end())
        throw std::runtime_error("dataset missing from matrix: " + meta.rows[i][0]);
      P.row(static_cast<Eigen::Index>(i)) = pm.P.row(it->second);
      observed.row(static_cast<Eigen::Index>(i)) = pm.observed.row(it->second);
      row_names.push_back(meta.rows[i][0]);
    }
    pm.P = std::move(P);
    pm.observed = std::move(observed);
    pm.row_names = std::move(row_names);
  }

  Eigen::MatrixXd Z(meta.rows.size(), feature_names.size());
  for (std::size_t i = 0; i < meta.rows.size(); ++i) {
    for (std::size_t j = 0; j < feature_names.size(); ++j) {
      auto v = csv::parse_double(meta.rows[i][j + 1]);
      if (!v) throw std::runtime_error("non-numeric meta feature for " + meta.rows[i][0]);
      Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
    }
  }

  SelectorOptions opts;
  opts.trees = trees;
  opts.seed = seed;
  CvReport rep = cross_validate(Z, feature_names, pms[0], pms[1], pms[2], folds, opts);

  csv::Table t;
  t.header = {"strategy", "acc", "nmi", "ari"};
  for (std::size_t s = 0; s < rep.strategies.size(); ++s)
    t.rows.push_back({rep.strategies[s], fmt(rep.scores(static_cast<Eigen::Index>(s), 0)),
                      fmt(rep.scores(static_cast<Eigen::Index>(s), 1)),
                      fmt(rep.scores(static_cast<Eigen::Index>(s), 2))});
  fs::path path = dir / "selection_report.csv";
  csv::write(path.string(), t);
  std::vector<std::string> outputs = {path.string()};

  // one deployable model per metric, trained on every dataset
  for (const auto& pm : pms) {
    SelectorModel model = fit_selector(Z, pm.P, pm.observed, opts, feature_names, pm.col_names,
                                       pm.metric);
    fs::path mp = dir / ("selector_" + to_string(pm.metric) + ".json");
    std::ofstream(mp) << model.to_json().dump() << '\n';
    outputs.push_back(mp.string());
  }
  print_status("select", outputs, {{"folds", folds}, {"strategies", rep.strategies.size()}});
  return 0;
}

int cmd_report(const std::string& results_path, const std::string& data,
               const std::string& group_by, const std::string& out) {
  fs::path dir = ensure_out_dir(out);
  auto results = read_results_csv(results_path);

  // group assignment needs the raw datasets
  std::map<std::string, std::string> group_of;
  if (group_by != "none") {
    if (data.empty()) throw UsageError("--data is required for --group-by");
    auto datasets = load_data_dir(data, false, 10000, 0);
    for (const auto& d : datasets) {
      if (group_by == "modality") {
        group_of[d.name] = to_string(d.modality);
      } else if (d.y) {
        ImbalanceStats s = imbalance_stats(*d.y);
        GroupTag tag = group_assign(d, s);
        group_of[d.name] = to_string(group_by == "dim" ? tag.dim_group : tag.ir_group);
      } else {
        group_of[d.name] = "unlabeled";
      }
    }
  }

  std::set<std::string> algos_present;
  for (const auto& r : results) algos_present.insert(algorithm_of_config_id(r.config_id));
  std::vector<Algorithm> algos;
  for (Algorithm a : algorithm_roster())
    if (algos_present.count(to_string(a))) algos.push_back(a);
  std::vector<Grid> grids = enumerate_grids(algos);

  std::vector<std::string> outputs;
  auto emit_tables = [&](const std::string& label, const std::vector<RunResult>& subset) {
    if (subset.empty()) return;
    SummaryTable def = summarize(subset, SummaryMode::default_config, grids);
    SummaryTable best = summarize(subset, SummaryMode::best, grids);
    csv::Table t;
    t.header = {"algorithm", "acc_default", "acc_best", "nmi_default", "nmi_best",
                "ari_default", "ari_best"};
    for (const auto& row : best.rows) {
      const SummaryRow* d = nullptr;
      for (const auto& dr : def.rows)
        if (dr.algorithm == row.algorithm) d = &dr;
      t.rows.push_back({row.algorithm, d ? opt_fmt(d->acc) : "", opt_fmt(row.acc),
                        d ? opt_fmt(d->nmi) : "", opt_fmt(row.nmi),
                        d ? opt_fmt(d->ari) : "", opt_fmt(row.ari)});
    }
    fs::path p = dir / ("summary_" + label + ".csv");
    csv::write(p.string(), t);
    outputs.push_back(p.string());

    // rank and paired-test tables per metric on the per-algorithm best matrix
    for (MetricKind kind : {MetricKind::acc, MetricKind::nmi, MetricKind::ari}) {
      PerformanceMatrix pm = build_matrix(subset, kind);
      if (pm.rows() < 2) continue;
      std::vector<std::string> algo_names;
      Eigen::MatrixXd bestm = best_per_algorithm(pm, algo_names);
      if (bestm.cols() < 2) continue;
      RankReport rr = ranks_and_tests(bestm);

      csv::Table ranks;
      ranks.header = {"algorithm", "avg_rank"};
      for (std::size_t a = 0; a < algo_names.size(); ++a)
        ranks.rows.push_back({algo_names[a], fmt(rr.avg_rank[a])});
      fs::path rp = dir / ("ranks_" + label + "_" + to_string(kind) + ".csv");
      csv::write(rp.string(), ranks);
      outputs.push_back(rp.string());

      csv::Table pv;
      pv.header = {"algorithm"};
      for (const auto& a : algo_names) pv.header.push_back(a);
      for (std::size_t a = 0; a < algo_names.size(); ++a) {
        std::vector<std::string> row{algo_names[a]};
        for (std::size_t b = 0; b < algo_names.size(); ++b)
          row.push_back(fmt(rr.p_values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b))));
        pv.rows.push_back(std::move(row));
      }
      fs::path pp = dir / ("pvalues_" + label + "_" + to_string(kind) + ".csv");
      csv::write(pp.string(), pv);
      outputs.push_back(pp.string());
    }
  };

  if (group_by == "none") {
    emit_tables("all", results);
  } else {
    std::map<std::string, std::vector<RunResult>> by_group;
    for (const auto& r : results) {
      auto it = group_of.find(r.dataset);
      std::string g = it != group_of.end() ? it->second : std::string("unknown");
      by_group[g].push_back(r);
    }
    for (const auto& [g, subset] : by_group) emit_tables(g, subset);
  }

  // performance-vector export (per-algorithm best, all results)
  {
    PerformanceMatrix pa = build_matrix(results, MetricKind::acc);
    PerformanceMatrix pn = build_matrix(results, MetricKind::nmi);
    PerformanceMatrix pr = build_matrix(results, MetricKind::ari);
    std::vector<std::string> algo_names;
    Eigen::MatrixXd ba = best_per_algorithm(pa, algo_names);
    std::vector<std::string> tmp;
    Eigen::MatrixXd bn = best_per_algorithm(pn, tmp);
    Eigen::MatrixXd br = best_per_algorithm(pr, tmp);
    PerformanceViews views = performance_vectors(ba, bn, br);

    auto write_view = [&](const std::string& name, const Eigen::MatrixXd& M,
                          const std::vector<std::string>& row_labels) {
      csv::Table t;
      t.header.push_back("name");
      for (int j = 0; j < M.cols(); ++j) t.header.push_back("v" + std::to_string(j));
      for (int i = 0; i < M.rows(); ++i) {
        std::vector<std::string> row{row_labels[static_cast<std::size_t>(i)]};
        for (int j = 0; j < M.cols(); ++j) row.push_back(fmt(M(i, j)));
        t.rows.push_back(std::move(row));
      }
      fs::path p = dir / name;
      csv::write(p.string(), t);
      outputs.push_back(p.string());
    };
    write_view("algo_vectors.csv", views.algorithm_view, algo_names);
    write_view("dataset_vectors.csv", views.dataset_view, pa.row_names);
  }

  print_status("report", outputs, {{"group_by", group_by}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clubench: conventional-clustering benchmark pipeline"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool seed_given = false;

  // demo
  auto* demo = app.add_subcommand("demo", "generate bundled synthetic datasets");
  std::string demo_out;
  int demo_count = 4, demo_samples = 120;
  demo->add_option("--out", demo_out, "output directory")->required();
  demo->add_option("--seed", seed, "rng seed")->each([&seed_given](const std::string&) { seed_given = true; });
  demo->add_option("--count", demo_count, "number of datasets");
  demo->add_option("--samples", demo_samples, "samples per dataset");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run the hyperparameter sweep");
  std::string sweep_data, sweep_out, sweep_algos = "all", sweep_grid_json;
  int sweep_repeats = 5, sweep_workers = 1, sweep_cap = 10000;
  bool sweep_no_standardize = false;
  sweep->add_option("--data", sweep_data, "directory of CSV datasets")->required();
  sweep->add_option("--out", sweep_out, "output directory")->required();
  sweep->add_option("--algos", sweep_algos, "comma list of algorithms or 'all'");
  sweep->add_option("--repeats", sweep_repeats, "repeats per cell");
  sweep->add_option("--seed", seed, "base seed")->each([&seed_given](const std::string&) { seed_given = true; });
  sweep->add_option("--workers", sweep_workers, "worker threads");
  sweep->add_option("--cap", sweep_cap, "subsample cap");
  sweep->add_flag("--no-standardize", sweep_no_standardize, "skip z-scoring");
  sweep->add_option("--grid-json", sweep_grid_json, "grid override json file");

  // summarize
  auto* summ = app.add_subcommand("summarize", "default/best/delta table from results");
  std::string summ_results, summ_out;
  summ->add_option("--results", summ_results, "results.csv path")->required();
  summ->add_option("--out", summ_out, "output directory")->required();

  // matrix
  auto* matrix = app.add_subcommand("matrix", "build a performance matrix");
  std::string matrix_results, matrix_metric = "acc", matrix_out;
  matrix->add_option("--results", matrix_results, "results.csv path")->required();
  matrix->add_option("--metric", matrix_metric, "acc|nmi|ari");
  matrix->add_option("--out", matrix_out, "output directory")->required();

  // ccr
  auto* ccr_cmd = app.add_subcommand("ccr", "cumulative contribution ratio of singular values");
  std::string ccr_matrix, ccr_out;
  int ccr_j = 60;
  ccr_cmd->add_option("--matrix", ccr_matrix, "matrix csv path")->required();
  ccr_cmd->add_option("--j", ccr_j, "number of leading singular values");
  ccr_cmd->add_option("--out", ccr_out, "optional output directory");

  // complete
  auto* compl_cmd = app.add_subcommand("complete", "MCAR mask + low-rank completion report");
  std::string compl_matrix, compl_mr = "0.5", compl_metric = "acc", compl_out;
  int compl_rank = 60, compl_seeds = 5, compl_iters = 200;
  double compl_tol = 1e-6;
  compl_cmd->add_option("--matrix", compl_matrix, "matrix csv path")->required();
  compl_cmd->add_option("--mr", compl_mr, "missing rate(s), comma separated");
  compl_cmd->add_option("--rank", compl_rank, "factorization rank");
  compl_cmd->add_option("--seeds", compl_seeds, "number of mask seeds");
  compl_cmd->add_option("--seed", seed, "base seed")->each([&seed_given](const std::string&) { seed_given = true; });
  compl_cmd->add_option("--metric", compl_metric, "acc|nmi|ari (for the clamp range)");
  compl_cmd->add_option("--iters", compl_iters, "max ALS iterations");
  compl_cmd->add_option("--tol", compl_tol, "relative objective tolerance");
  compl_cmd->add_option("--out", compl_out, "output directory")->required();

  // metafeat
  auto* metaf = app.add_subcommand("metafeat", "meta-feature extraction");
  std::string metaf_data, metaf_out;
  int metaf_cap = 10000;
  bool metaf_no_standardize = false;
  metaf->add_option("--data", metaf_data, "directory of CSV datasets")->required();
  metaf->add_option("--out", metaf_out, "output directory")->required();
  metaf->add_option("--seed", seed, "rng seed")->each([&seed_given](const std::string&) { seed_given = true; });
  metaf->add_option("--cap", metaf_cap, "subsample cap");
  metaf->add_flag("--no-standardize", metaf_no_standardize, "skip z-scoring");

  // select
  auto* select = app.add_subcommand("select", "meta-feature model selection CV");
  std::string select_meta, select_matrices, select_out;
  int select_folds = 5, select_trees = 200;
  select->add_option("--meta", select_meta, "meta.csv path")->required();
  select->add_option("--matrices", select_matrices, "acc,nmi,ari matrix csv paths")->required();
  select->add_option("--folds", select_folds, "cross-validation folds");
  select->add_option("--seed", seed, "rng seed")->each([&seed_given](const std::string&) { seed_given = true; });
  select->add_option("--trees", select_trees, "forest size");
  select->add_option("--out", select_out, "output directory")->required();

  // report
  auto* report = app.add_subcommand("report", "summary + rank/p-value tables");
  std::string report_results, report_data, report_group = "none", report_out;
  report->add_option("--results", report_results, "results.csv path")->required();
  report->add_option("--data", report_data, "dataset directory (for grouping)");
  report->add_option("--group-by", report_group, "modality|dim|ir|none");
  report->add_option("--out", report_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the usage message to stderr
    std::cout << json{{"status", "error"}, {"message", e.what()}}.dump() << std::endl;
    return 1;
  }

  try {
    if (!seed_given) seed = default_seed();
    if (demo->parsed()) return cmd_demo(demo_out, seed, demo_count, demo_samples);
    if (sweep->parsed())
      return cmd_sweep(sweep_data, sweep_out, sweep_algos, sweep_repeats, seed, sweep_workers,
                       !sweep_no_standardize, sweep_cap, sweep_grid_json);
    if (summ->parsed()) return cmd_summarize(summ_results, summ_out);
    if (matrix->parsed()) return cmd_matrix(matrix_results, matrix_metric, matrix_out);
    if (ccr_cmd->parsed()) return cmd_ccr(ccr_matrix, ccr_j, ccr_out);
    if (compl_cmd->parsed())
      return cmd_complete(compl_matrix, compl_mr, compl_rank, compl_seeds, seed, compl_metric,
                          compl_iters, compl_tol, compl_out);
    if (metaf->parsed())
      return cmd_metafeat(metaf_data, metaf_out, seed, !metaf_no_standardize, metaf_cap);
    if (select->parsed())
      return cmd_select(select_meta, select_matrices, select_folds, seed, select_trees,
                        select_out);
    if (report->parsed()) return cmd_report(report_results, report_data, report_group, report_out);
  } catch (const UsageError& e) {
    std::cout << json{{"status", "error"}, {"message", e.what()}}.dump() << std::endl;
    std::cerr << "usage error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cout << json{{"status", "error"}, {"message", e.what()}}.dump() << std::endl;
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
