#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "clubench/perfmatrix.hpp"

namespace clubench {

struct TreeNode {
  int feature = -1;          // -1 for leaves
  double threshold = 0.0;    // x(feature) <= threshold goes left
  int left = -1, right = -1;
  std::vector<double> leaf;  // mean target vector, only for leaves
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root
};

struct SelectorOptions {
  int trees = 200;
  int max_depth = 12;
  int min_leaf = 2;
  std::uint64_t seed = 0;
};

// Bootstrap-bagged multi-output CART forest mapping meta-features to a full
// performance vector. Unobserved targets are excluded from the variance
// criterion and from leaf means.
struct SelectorModel {
  std::vector<RegressionTree> forest;
  std::vector<std::string> feature_manifest;
  std::vector<std::string> target_manifest;  // config ids
  MetricKind metric = MetricKind::acc;
  SelectorOptions options;

  nlohmann::json to_json() const;
  static SelectorModel from_json(const nlohmann::json& j);
};

SelectorModel fit_selector(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& P,
                           const Mask& observed, const SelectorOptions& opts,
                           std::vector<std::string> feature_manifest,
                           std::vector<std::string> target_manifest, MetricKind metric);

// Mean of the per-tree leaf vectors.
std::vector<double> predict(const SelectorModel& model, const Eigen::VectorXd& z);

struct SelectionOutcome {
  std::string strategy;
  int column = -1;
  std::string config_id;
  std::optional<double> realized;  // held-out truth at the chosen column
};

// Argmax over the predicted vector, ties to the lowest column index. The
// feature manifest must match the model's (hard error otherwise).
SelectionOutcome predict_and_select(const SelectorModel& model, const Eigen::VectorXd& z,
                                    const std::vector<std::string>& feature_manifest);

// Historical-best: the single column of one algorithm with the highest
// training-row mean. EUB: per-test-row maximum over all columns.
enum class BaselineStrategy { historical_best, eub };

std::vector<SelectionOutcome> baselines(const PerformanceMatrix& pm,
                                        const std::vector<int>& train_rows,
                                        const std::vector<int>& test_rows,
                                        BaselineStrategy strategy,
                                        const std::string& algorithm = "");

struct CvReport {
  std::vector<std::string> strategies;      // row labels
  Eigen::MatrixXd scores;                   // strategies x 3 metrics (acc, nmi, ari)
  std::vector<std::vector<int>> folds;      // dataset indices per fold
  // per fold x strategy x metric means, for dominance checks
  std::vector<Eigen::MatrixXd> fold_scores;
};

// Table-style 5-fold protocol: one regressor per metric per fold, scored on
// held-out rows; EUB and per-algorithm historical-best baselines.
CvReport cross_validate(const Eigen::MatrixXd& Z, const std::vector<std::string>& feature_manifest,
                        const PerformanceMatrix& P_acc, const PerformanceMatrix& P_nmi,
                        const PerformanceMatrix& P_ari, int folds, const SelectorOptions& opts);

}  // namespace clubench
