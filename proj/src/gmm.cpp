#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "algo_detail.hpp"

namespace clubench::detail {

namespace {

constexpr double kCovReg = 1e-6;
constexpr double kTol = 1e-6;
constexpr int kMaxIter = 200;

struct FullComponent {
  Eigen::VectorXd mean;
  Eigen::LLT<Eigen::MatrixXd> chol;
  double log_det_half = 0.0;  // 0.5 * log|Sigma|
};

}  // namespace

std::vector<int> gmm(const Eigen::MatrixXd& X, int k, GmmCovariance cov, GmmInit init,
                     std::uint64_t seed, std::vector<double>* loglik_trace) {
  const int n = static_cast<int>(X.rows());
  const int m = static_cast<int>(X.cols());
  if (k < 1 || k > n) throw std::invalid_argument("gmm: k out of range");

  Rng rng(seed);
  Eigen::MatrixXd resp(n, k);

  switch (init) {
    case GmmInit::kmeans: {
      KMeansOptions opts;
      opts.k = k;
      opts.init = KMeansInit::kmeanspp;
      opts.metric = Metric::euclidean;
      opts.n_init = 1;
      opts.max_iter = 100;
      KMeansResult km = kmeans(X, opts, rng.fork(1));
      resp.setZero();
      for (int i = 0; i < n; ++i) resp(i, km.labels[static_cast<std::size_t>(i)]) = 1.0;
      break;
    }
    case GmmInit::kmeanspp: {
      Eigen::MatrixXd centers = kmeanspp_centers(X, k, Metric::euclidean, rng);
      resp.setZero();
      for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          double d = (X.row(i) - centers.row(c)).squaredNorm();
          if (d < best_d) {
            best_d = d;
            best = c;
          }
        }
        resp(i, best) = 1.0;
      }
      break;
    }
    case GmmInit::random: {
      for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int c = 0; c < k; ++c) {
          double u = rng.uniform() + 1e-12;
          resp(i, c) = u;
          row_sum += u;
        }
        resp.row(i) /= row_sum;
      }
      break;
    }
  }

  Eigen::VectorXd weights(k);
  Eigen::MatrixXd means(k, m);
  std::vector<FullComponent> full(static_cast<std::size_t>(k));
  Eigen::VectorXd spherical_var(k);

  const double log2pi = std::log(2.0 * std::numbers::pi);
  double prev_ll = -std::numeric_limits<double>::infinity();

  Eigen::MatrixXd log_prob(n, k);

  for (int iter = 0; iter < kMaxIter; ++iter) {
    // M step
    Eigen::VectorXd nk = resp.colwise().sum();
    for (int c = 0; c < k; ++c) {
      if (nk(c) < 1e-10) throw ClusteringFailure("gmm: component collapsed to zero weight");
    }
    weights = nk / static_cast<double>(n);
    means = (resp.transpose() * X).array().colwise() / nk.array();

    if (cov == GmmCovariance::full) {
      for (int c = 0; c < k; ++c) {
        Eigen::MatrixXd centered = X.rowwise() - means.row(c);
        Eigen::MatrixXd sigma =
            (centered.transpose() * (centered.array().colwise() * resp.col(c).array()).matrix()) /
            nk(c);
        sigma.diagonal().array() += kCovReg;
        full[static_cast<std::size_t>(c)].mean = means.row(c).transpose();
        full[static_cast<std::size_t>(c)].chol.compute(sigma);
        if (full[static_cast<std::size_t>(c)].chol.info() != Eigen::Success)
          throw ClusteringFailure("gmm: singular covariance after regularization");
        double log_det = 0.0;
        for (int j = 0; j < m; ++j)
          log_det += std::log(full[static_cast<std::size_t>(c)].chol.matrixL()(j, j));
        full[static_cast<std::size_t>(c)].log_det_half = log_det;
      }
    } else {
      for (int c = 0; c < k; ++c) {
        Eigen::MatrixXd centered = X.rowwise() - means.row(c);
        double var =
            (centered.array().square().rowwise().sum() * resp.col(c).array()).sum() / (nk(c) * m);
        spherical_var(c) = var + kCovReg;
      }
    }

    // E step
    for (int c = 0; c < k; ++c) {
      if (cov == GmmCovariance::full) {
        const auto& comp = full[static_cast<std::size_t>(c)];
        Eigen::MatrixXd centered = (X.rowwise() - means.row(c)).transpose();  // m x n
        Eigen::MatrixXd solved = comp.chol.matrixL().solve(centered);
        Eigen::VectorXd maha = solved.array().square().colwise().sum();
        log_prob.col(c) = (-0.5 * (maha.array() + m * log2pi)) - comp.log_det_half +
                          std::log(weights(c));
      } else {
        double var = spherical_var(c);
        Eigen::VectorXd d2 = (X.rowwise() - means.row(c)).rowwise().squaredNorm();
        log_prob.col(c) = (-0.5 * (d2.array() / var + m * (log2pi + std::log(var)))) +
                          std::log(weights(c));
      }
    }

    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      double mx = log_prob.row(i).maxCoeff();
      double sum = (log_prob.row(i).array() - mx).exp().sum();
      double lse = mx + std::log(sum);
      ll += lse;
      resp.row(i) = (log_prob.row(i).array() - lse).exp();
    }
    ll /= n;
    if (loglik_trace) loglik_trace->push_back(ll);

    if (std::abs(ll - prev_ll) < kTol) break;
    prev_ll = ll;
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::Index best = 0;
    resp.row(i).maxCoeff(&best);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return compress_labels(std::move(labels));
}

}  // namespace clubench::detail
