#pragma once

#include <Eigen/Dense>
#include <string>

namespace clubench {

enum class Metric { euclidean, manhattan, cosine };

std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);

double distance(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, Metric m);

// Full symmetric distance matrix with zero diagonal. Cosine requires every
// row to have a nonzero norm.
Eigen::MatrixXd pairwise_distance(const Eigen::MatrixXd& X, Metric m);

// Rows scaled to unit L2 norm; throws on a zero row.
Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& X);

}  // namespace clubench
