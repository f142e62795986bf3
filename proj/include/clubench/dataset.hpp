#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace clubench {

enum class Modality { tabular, image, text, bioinfo };

std::string to_string(Modality m);
Modality modality_from_string(const std::string& s);

// A loaded dataset: rows are samples, columns are features. Labels, when
// present, are contiguous ints 0..K-1 with every class non-empty. Immutable
// after construction; safe to share across worker threads.
struct Dataset {
  std::string name;
  Eigen::MatrixXd X;
  std::optional<std::vector<int>> y;
  int K = 0;  // ground-truth cluster count when y is present, else user-supplied (0 = unknown)
  Modality modality = Modality::tabular;

  int n() const { return static_cast<int>(X.rows()); }
  int m() const { return static_cast<int>(X.cols()); }
  bool has_labels() const { return y.has_value(); }

  void validate() const;  // throws std::invalid_argument on a broken invariant
};

struct ImbalanceStats {
  double r_mm = 0.0;  // min class size / max class size, in (0, 1]
  double r_ma = 0.0;  // min class size / n, in (0, 0.5]
  double ir = 0.0;    // population std of the class-proportion vector
};

enum class Band { low, mid, high };

std::string to_string(Band b);

struct GroupTag {
  Band dim_group;
  Band ir_group;
  Modality modality;
};

// Loads a CSV with a header row. Feature columns must be numeric and finite.
// The label column (default name "label") is optional; string labels are
// mapped to 0..K-1 in first-occurrence order. A sidecar "<stem>.json" next to
// the file may declare {name, modality, K}.
Dataset load_csv(const std::string& path, const std::string& label_column = "label");

void save_csv(const std::string& path, const Dataset& d, bool write_sidecar = true);

// Subsamples to at most `cap` rows (uniform without replacement, seeded),
// then optionally z-scores each feature (constant features become all-zero).
Dataset preprocess(const Dataset& d, bool standardize, int cap = 10000,
                   std::uint64_t seed = 0);

ImbalanceStats imbalance_stats(const std::vector<int>& y);

GroupTag group_assign(const Dataset& d, const ImbalanceStats& s);

std::vector<int> class_counts(const std::vector<int>& y);

}  // namespace clubench
