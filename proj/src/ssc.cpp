#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "algo_detail.hpp"

namespace clubench::detail {

// Per-sample elastic form: min ||c||_1 + (lambda/2) ||x_i - X^T c||_2^2 with
// c_i forced to zero. ADMM with rho = 1; one Cholesky of (lambda*G + rho*I)
// is shared by every sample.
Eigen::MatrixXd ssc_coefficients(const Eigen::MatrixXd& X, double lambda, int admm_iters,
                                 double tol) {
  const int n = static_cast<int>(X.rows());
  if (n < 2) throw std::invalid_argument("ssc: need at least 2 samples");
  if (lambda <= 0.0) throw std::invalid_argument("ssc: lambda must be positive");

  const double rho = 1.0;
  Eigen::MatrixXd gram = X * X.transpose();
  Eigen::MatrixXd lhs = lambda * gram;
  lhs.diagonal().array() += rho;
  Eigen::LLT<Eigen::MatrixXd> chol(lhs);
  if (chol.info() != Eigen::Success)
    throw ClusteringFailure("ssc: factorization failed");

  auto soft = [](double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
  };

  Eigen::MatrixXd C(n, n);
  Eigen::VectorXd c(n), z(n), u(n), zprev(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd rhs_base = lambda * gram.col(i);
    z.setZero();
    u.setZero();
    for (int it = 0; it < admm_iters; ++it) {
      c = chol.solve(rhs_base + rho * (z - u));
      zprev = z;
      for (int j = 0; j < n; ++j) z(j) = soft(c(j) + u(j), 1.0 / rho);
      z(i) = 0.0;  // no self-representation
      u += c - z;
      double primal = (c - z).cwiseAbs().maxCoeff();
      double dual = (z - zprev).cwiseAbs().maxCoeff();
      if (primal < tol && dual < tol) break;
    }
    C.col(i) = z;
  }
  return C;
}

std::vector<int> ssc(const Eigen::MatrixXd& X, int k, double lambda, std::uint64_t seed) {
  Eigen::MatrixXd C = ssc_coefficients(X, lambda);
  Eigen::MatrixXd W = C.cwiseAbs() + C.cwiseAbs().transpose();
  W.diagonal().setZero();
  return spectral_from_affinity(W, k, seed);
}

}  // namespace clubench::detail
