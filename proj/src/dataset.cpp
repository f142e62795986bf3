#include "clubench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "clubench/csv.hpp"
#include "clubench/rng.hpp"

namespace fs = std::filesystem;

namespace clubench {

std::string to_string(Modality m) {
  switch (m) {
    case Modality::tabular: return "tabular";
    case Modality::image: return "image";
    case Modality::text: return "text";
    case Modality::bioinfo: return "bioinfo";
  }
  return "tabular";
}

Modality modality_from_string(const std::string& s) {
  if (s == "tabular") return Modality::tabular;
  if (s == "image") return Modality::image;
  if (s == "text") return Modality::text;
  if (s == "bioinfo") return Modality::bioinfo;
  throw std::invalid_argument("unknown modality: " + s);
}

std::string to_string(Band b) {
  switch (b) {
    case Band::low: return "low";
    case Band::mid: return "mid";
    case Band::high: return "high";
  }
  return "low";
}

void Dataset::validate() const {
  if (n() < 2) throw std::invalid_argument("dataset needs at least 2 samples");
  if (m() < 1) throw std::invalid_argument("dataset needs at least 1 feature");
  if (!X.allFinite()) throw std::invalid_argument("feature matrix contains NaN/Inf");
  if (y) {
    if (static_cast<int>(y->size()) != n())
      throw std::invalid_argument("label vector length does not match sample count");
    std::vector<int> counts = class_counts(*y);
    if (static_cast<int>(counts.size()) != K)
      throw std::invalid_argument("K does not match the number of distinct labels");
    for (int c : counts)
      if (c == 0) throw std::invalid_argument("labels must be contiguous 0..K-1");
  }
  if (K > 0 && K >= n()) throw std::invalid_argument("K must be smaller than n");
}

std::vector<int> class_counts(const std::vector<int>& y) {
  int k = 0;
  for (int v : y) {
    if (v < 0) throw std::invalid_argument("negative label");
    k = std::max(k, v + 1);
  }
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int v : y) counts[static_cast<std::size_t>(v)]++;
  return counts;
}

namespace {

fs::path sidecar_path(const std::string& csv_path) {
  fs::path p(csv_path);
  p.replace_extension(".json");
  return p;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column) {
  if (!fs::exists(path)) throw std::runtime_error("missing file: " + path);
  csv::Table t = csv::read(path);
  if (t.rows.empty()) throw std::invalid_argument("empty dataset: " + path);

  int label_idx = -1;
  for (std::size_t j = 0; j < t.header.size(); ++j)
    if (t.header[j] == label_column) label_idx = static_cast<int>(j);

  const int n = static_cast<int>(t.rows.size());
  const int total_cols = static_cast<int>(t.header.size());
  const int m = total_cols - (label_idx >= 0 ? 1 : 0);
  if (m < 1) throw std::invalid_argument("dataset needs at least 1 feature column");

  Dataset d;
  d.name = fs::path(path).stem().string();
  d.X.resize(n, m);

  std::vector<std::string> raw_labels;
  if (label_idx >= 0) raw_labels.reserve(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    if (static_cast<int>(row.size()) != total_cols)
      throw std::invalid_argument("ragged row " + std::to_string(i + 2) + " in " + path);
    int jj = 0;
    for (int j = 0; j < total_cols; ++j) {
      if (j == label_idx) {
        raw_labels.push_back(row[static_cast<std::size_t>(j)]);
        continue;
      }
      auto v = csv::parse_double(row[static_cast<std::size_t>(j)]);
      if (!v)
        throw std::invalid_argument("non-numeric feature at row " + std::to_string(i + 2) +
                                    ", column " + t.header[static_cast<std::size_t>(j)]);
      d.X(i, jj++) = *v;
    }
  }

  if (label_idx >= 0) {
    // first-occurrence relabeling keeps K and the class ids deterministic
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::map<std::string, int> seen;
    int next = 0;
    for (int i = 0; i < n; ++i) {
      auto [it, inserted] = seen.try_emplace(raw_labels[static_cast<std::size_t>(i)], next);
      if (inserted) ++next;
      labels[static_cast<std::size_t>(i)] = it->second;
    }
    if (next < 2) throw std::invalid_argument("label column has a single distinct value (K must be >= 2)");
    d.y = std::move(labels);
    d.K = next;
  }

  fs::path sc = sidecar_path(path);
  if (fs::exists(sc)) {
    std::ifstream in(sc);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.contains("name")) d.name = j["name"].get<std::string>();
    if (j.contains("modality")) d.modality = modality_from_string(j["modality"].get<std::string>());
    if (j.contains("K")) {
      int k = j["K"].get<int>();
      if (d.y && k != d.K)
        throw std::invalid_argument("sidecar K disagrees with the label column in " + path);
      d.K = k;
    }
  }

  d.validate();
  return d;
}

void save_csv(const std::string& path, const Dataset& d, bool write_sidecar) {
  csv::Table t;
  for (int j = 0; j < d.m(); ++j) t.header.push_back("f" + std::to_string(j));
  if (d.y) t.header.push_back("label");
  t.rows.reserve(static_cast<std::size_t>(d.n()));
  for (int i = 0; i < d.n(); ++i) {
    std::vector<std::string> row;
    row.reserve(t.header.size());
    for (int j = 0; j < d.m(); ++j) row.push_back(csv::format_double(d.X(i, j)));
    if (d.y) row.push_back(std::to_string((*d.y)[static_cast<std::size_t>(i)]));
    t.rows.push_back(std::move(row));
  }
  csv::write(path, t);
  if (write_sidecar) {
    nlohmann::json j;
    j["name"] = d.name;
    j["modality"] = to_string(d.modality);
    j["K"] = d.K;
    std::ofstream out(sidecar_path(path));
    out << j.dump(2) << '\n';
  }
}

Dataset preprocess(const Dataset& d, bool standardize, int cap, std::uint64_t seed) {
  if (cap < 2) throw std::invalid_argument("cap must be >= 2");
  Dataset out = d;

  if (d.n() > cap) {
    Rng rng(seed);
    std::vector<int> keep = rng.sample_without_replacement(d.n(), cap);
    Eigen::MatrixXd sub(cap, d.m());
    std::vector<int> suby;
    if (d.y) suby.reserve(static_cast<std::size_t>(cap));
    for (int i = 0; i < cap; ++i) {
      sub.row(i) = d.X.row(keep[static_cast<std::size_t>(i)]);
      if (d.y) suby.push_back((*d.y)[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])]);
    }
    out.X = std::move(sub);
    if (d.y) {
      // subsampling can drop whole classes; relabel to stay contiguous
      std::vector<int> remap(static_cast<std::size_t>(d.K), -1);
      int next = 0;
      for (int& v : suby) {
        if (remap[static_cast<std::size_t>(v)] < 0) remap[static_cast<std::size_t>(v)] = next++;
        v = remap[static_cast<std::size_t>(v)];
      }
      out.y = std::move(suby);
      out.K = next;
    }
  }

  if (standardize) {
    const int n = out.n();
    for (int j = 0; j < out.m(); ++j) {
      double mean = out.X.col(j).mean();
      double var = (out.X.col(j).array() - mean).square().sum() / n;
      double sd = std::sqrt(var);
      if (sd < 1e-12 * std::max(1.0, std::abs(mean))) {
        out.X.col(j).setZero();
      } else {
        out.X.col(j) = (out.X.col(j).array() - mean) / sd;
      }
    }
  }

  return out;
}

ImbalanceStats imbalance_stats(const std::vector<int>& y) {
  if (y.empty()) throw std::invalid_argument("empty label vector");
  std::map<int, int> counts;
  for (int v : y) counts[v]++;
  if (counts.size() < 2) throw std::invalid_argument("imbalance stats need at least 2 classes");

  int cmin = static_cast<int>(y.size()), cmax = 0;
  for (auto& [cls, c] : counts) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  const double n = static_cast<double>(y.size());
  const double k = static_cast<double>(counts.size());

  double mean_p = 1.0 / k;
  double ss = 0.0;
  for (auto& [cls, c] : counts) {
    double p = c / n;
    ss += (p - mean_p) * (p - mean_p);
  }

  ImbalanceStats s;
  s.r_mm = static_cast<double>(cmin) / static_cast<double>(cmax);
  s.r_ma = static_cast<double>(cmin) / n;
  s.ir = std::sqrt(ss / k);
  return s;
}

GroupTag group_assign(const Dataset& d, const ImbalanceStats& s) {
  GroupTag g;
  const int m = d.m();
  g.dim_group = (m <= 100) ? Band::low : (m <= 500 ? Band::mid : Band::high);
  g.ir_group = (s.ir < 0.1) ? Band::low : (s.ir <= 0.3 ? Band::mid : Band::high);
  g.modality = d.modality;
  return g;
}

}  // namespace clubench
