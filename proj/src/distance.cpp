#include "clubench/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clubench {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::euclidean: return "euclidean";
    case Metric::manhattan: return "manhattan";
    case Metric::cosine: return "cosine";
  }
  return "euclidean";
}

Metric metric_from_string(const std::string& s) {
  if (s == "euclidean") return Metric::euclidean;
  if (s == "manhattan") return Metric::manhattan;
  if (s == "cosine") return Metric::cosine;
  throw std::invalid_argument("unknown metric: " + s);
}

double distance(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b, Metric m) {
  switch (m) {
    case Metric::euclidean:
      return (a - b).norm();
    case Metric::manhattan:
      return (a - b).cwiseAbs().sum();
    case Metric::cosine: {
      double na = a.norm(), nb = b.norm();
      if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("zero vector under cosine metric");
      double sim = a.dot(b) / (na * nb);
      return std::clamp(1.0 - sim, 0.0, 2.0);
    }
  }
  return 0.0;
}

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd out = X;
  for (int i = 0; i < out.rows(); ++i) {
    double norm = out.row(i).norm();
    if (norm <= 0.0) throw std::invalid_argument("zero vector under cosine metric");
    out.row(i) /= norm;
  }
  return out;
}

Eigen::MatrixXd pairwise_distance(const Eigen::MatrixXd& X, Metric m) {
  const int n = static_cast<int>(X.rows());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  if (m == Metric::euclidean) {
    Eigen::VectorXd sq = X.rowwise().squaredNorm();
    Eigen::MatrixXd G = X * X.transpose();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double d2 = std::max(0.0, sq(i) + sq(j) - 2.0 * G(i, j));
        double d = std::sqrt(d2);
        D(i, j) = d;
        D(j, i) = d;
      }
    }
  } else if (m == Metric::cosine) {
    Eigen::MatrixXd Xn = normalize_rows(X);
    Eigen::MatrixXd S = Xn * Xn.transpose();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double d = std::clamp(1.0 - S(i, j), 0.0, 2.0);
        D(i, j) = d;
        D(j, i) = d;
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        double d = (X.row(i) - X.row(j)).cwiseAbs().sum();
        D(i, j) = d;
        D(j, i) = d;
      }
    }
  }
  return D;
}

}  // namespace clubench
