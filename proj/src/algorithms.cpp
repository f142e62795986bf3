#include "clubench/algorithms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "algo_detail.hpp"

namespace clubench {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::KMeans: return "KMeans";
    case Algorithm::KernelKMeans: return "KernelKMeans";
    case Algorithm::AggClu: return "AggClu";
    case Algorithm::DBSCAN: return "DBSCAN";
    case Algorithm::BIRCH: return "BIRCH";
    case Algorithm::GMM: return "GMM";
    case Algorithm::SpeClu: return "SpeClu";
    case Algorithm::MeanShift: return "MeanShift";
    case Algorithm::kPC: return "kPC";
    case Algorithm::SSC: return "SSC";
  }
  return "KMeans";
}

const std::vector<Algorithm>& algorithm_roster() {
  static const std::vector<Algorithm> roster = {
      Algorithm::KMeans, Algorithm::KernelKMeans, Algorithm::AggClu,  Algorithm::DBSCAN,
      Algorithm::BIRCH,  Algorithm::GMM,          Algorithm::SpeClu,  Algorithm::MeanShift,
      Algorithm::kPC,    Algorithm::SSC};
  return roster;
}

Algorithm algorithm_from_string(const std::string& s) {
  for (Algorithm a : algorithm_roster())
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown algorithm: " + s);
}

bool takes_k(Algorithm a) {
  return a != Algorithm::DBSCAN && a != Algorithm::MeanShift;
}

ParamValue ParamValue::real(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return {std::move(s)};
}

double ParamValue::as_double() const {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    throw std::invalid_argument("parameter is not numeric: " + text);
  return v;
}

int ParamValue::as_int() const {
  double v = as_double();
  int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-9) throw std::invalid_argument("parameter is not integral: " + text);
  return i;
}

const ParamValue* AlgorithmConfig::find(const std::string& name) const {
  for (const auto& [k, v] : params)
    if (k == name) return &v;
  return nullptr;
}

const ParamValue& AlgorithmConfig::at(const std::string& name) const {
  const ParamValue* p = find(name);
  if (!p) throw std::invalid_argument("missing parameter: " + name);
  return *p;
}

void AlgorithmConfig::set(const std::string& name, ParamValue v) {
  for (auto& [k, val] : params) {
    if (k == name) {
      val = std::move(v);
      return;
    }
  }
  params.emplace_back(name, std::move(v));
}

std::string config_id(const AlgorithmConfig& cfg) {
  std::string id = to_string(cfg.algorithm) + "/";
  for (std::size_t i = 0; i < cfg.params.size(); ++i) {
    if (i) id += ';';
    id += cfg.params[i].first + "=" + cfg.params[i].second.text;
  }
  return id;
}

AlgorithmConfig config_from_id(const std::string& id) {
  auto slash = id.find('/');
  if (slash == std::string::npos) throw std::invalid_argument("malformed config id: " + id);
  AlgorithmConfig cfg;
  cfg.algorithm = algorithm_from_string(id.substr(0, slash));
  std::string rest = id.substr(slash + 1);
  std::size_t pos = 0;
  while (pos < rest.size()) {
    std::size_t semi = rest.find(';', pos);
    if (semi == std::string::npos) semi = rest.size();
    std::string pair = rest.substr(pos, semi - pos);
    auto eq = pair.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed config id: " + id);
    cfg.params.emplace_back(pair.substr(0, eq), ParamValue{pair.substr(eq + 1)});
    pos = semi + 1;
  }
  return cfg;
}

std::string algorithm_of_config_id(const std::string& id) {
  auto slash = id.find('/');
  return slash == std::string::npos ? id : id.substr(0, slash);
}

ScaleBases scale_bases(const Eigen::MatrixXd& X, Metric metric, int sample_cap,
                       std::uint64_t seed) {
  const int n = static_cast<int>(X.rows());
  if (n < 2) throw std::invalid_argument("scale_bases: need at least 2 samples");

  Eigen::MatrixXd sample;
  if (n > sample_cap) {
    Rng rng(seed);
    std::vector<int> keep = rng.sample_without_replacement(n, sample_cap);
    sample.resize(sample_cap, X.cols());
    for (int i = 0; i < sample_cap; ++i) sample.row(i) = X.row(keep[static_cast<std::size_t>(i)]);
  } else {
    sample = X;
  }
  const int s = static_cast<int>(sample.rows());

  double dist_sum = 0.0;
  std::vector<double> sq;
  sq.reserve(static_cast<std::size_t>(s) * (s - 1) / 2);
  Eigen::MatrixXd normalized;
  if (metric == Metric::cosine) normalized = normalize_rows(sample);
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      double d = (metric == Metric::cosine)
                     ? std::clamp(1.0 - normalized.row(i).dot(normalized.row(j)), 0.0, 2.0)
                     : distance(sample.row(i), sample.row(j), metric);
      dist_sum += d;
      sq.push_back((sample.row(i) - sample.row(j)).squaredNorm());
    }
  }
  const double pair_count = static_cast<double>(sq.size());

  ScaleBases b;
  b.eps_base = dist_sum / pair_count;

  std::sort(sq.begin(), sq.end());
  double median;
  std::size_t p = sq.size();
  median = (p % 2 == 1) ? sq[p / 2] : 0.5 * (sq[p / 2 - 1] + sq[p / 2]);

  if (b.eps_base <= 0.0 || median <= 0.0)
    throw ClusteringFailure("degenerate geometry: identical samples");
  b.gamma_base = 1.0 / (2.0 * median);
  return b;
}

namespace {

int bound_k(const AlgorithmConfig& cfg, int n) {
  if (!cfg.k) throw std::invalid_argument("config is missing K");
  int k = *cfg.k;
  if (k < 1 || k > n) throw std::invalid_argument("K out of range for this dataset");
  return k;
}

KMeansInit init_from_string(const std::string& s) {
  if (s == "kmeans++") return KMeansInit::kmeanspp;
  if (s == "random") return KMeansInit::random;
  throw std::invalid_argument("unknown init: " + s);
}

}  // namespace

std::vector<int> fit_predict(const AlgorithmConfig& cfg, const Eigen::MatrixXd& X,
                             std::uint64_t seed) {
  const int n = static_cast<int>(X.rows());
  if (n < 2) throw std::invalid_argument("fit_predict: need at least 2 samples");
  if (!X.allFinite()) throw std::invalid_argument("fit_predict: X contains NaN/Inf");
  if (takes_k(cfg.algorithm)) bound_k(cfg, n);

  Rng rng(seed);
  const std::uint64_t algo_seed = rng.fork(1);
  const std::uint64_t scale_seed = rng.fork(2);

  switch (cfg.algorithm) {
    case Algorithm::KMeans: {
      KMeansOptions opts;
      opts.k = bound_k(cfg, n);
      opts.init = init_from_string(cfg.at("init").text);
      opts.metric = metric_from_string(cfg.at("metric").text);
      opts.n_init = cfg.has("n_init") ? cfg.at("n_init").as_int() : 10;
      opts.max_iter = cfg.has("max_iter") ? cfg.at("max_iter").as_int() : 500;
      return kmeans(X, opts, algo_seed).labels;
    }
    case Algorithm::KernelKMeans: {
      ScaleBases bases = scale_bases(X, Metric::euclidean, 2000, scale_seed);
      double gamma_eff = cfg.at("gamma").as_double() * bases.gamma_base;
      KMeansInit init = init_from_string(cfg.at("init").text);
      int max_iter = cfg.has("max_iter") ? cfg.at("max_iter").as_int() : 500;
      return detail::kernel_kmeans(X, bound_k(cfg, n), gamma_eff, init, max_iter, algo_seed);
    }
    case Algorithm::AggClu: {
      Metric metric = metric_from_string(cfg.at("metric").text);
      detail::Linkage linkage = detail::linkage_from_string(cfg.at("linkage").text);
      return detail::agglomerative(X, metric, linkage, bound_k(cfg, n));
    }
    case Algorithm::DBSCAN: {
      Metric metric = metric_from_string(cfg.at("metric").text);
      ScaleBases bases = scale_bases(X, metric, 2000, scale_seed);
      double eps_abs = cfg.at("eps").as_double() * bases.eps_base;
      return detail::dbscan(X, eps_abs, cfg.at("min_sample").as_int(), metric);
    }
    case Algorithm::BIRCH: {
      ScaleBases bases = scale_bases(X, Metric::euclidean, 2000, scale_seed);
      double threshold_abs = cfg.at("threshold").as_double() * bases.eps_base;
      return detail::birch(X, threshold_abs, cfg.at("branching_factor").as_int(),
                           bound_k(cfg, n));
    }
    case Algorithm::GMM: {
      const std::string& c = cfg.at("covariance_type").text;
      detail::GmmCovariance covariance;
      if (c == "full")
        covariance = detail::GmmCovariance::full;
      else if (c == "spherical")
        covariance = detail::GmmCovariance::spherical;
      else
        throw std::invalid_argument("unknown covariance_type: " + c);
      const std::string& ip = cfg.at("init_params").text;
      detail::GmmInit init;
      if (ip == "kmeans")
        init = detail::GmmInit::kmeans;
      else if (ip == "kmeans++")
        init = detail::GmmInit::kmeanspp;
      else if (ip == "random")
        init = detail::GmmInit::random;
      else
        throw std::invalid_argument("unknown init_params: " + ip);
      return detail::gmm(X, bound_k(cfg, n), covariance, init, algo_seed);
    }
    case Algorithm::SpeClu: {
      const std::string& affinity = cfg.at("affinity").text;
      Eigen::MatrixXd W;
      if (affinity == "knn") {
        W = detail::knn_affinity(X, cfg.at("k").as_int());
      } else if (affinity == "rbf") {
        ScaleBases bases = scale_bases(X, Metric::euclidean, 2000, scale_seed);
        W = detail::rbf_affinity(X, cfg.at("gamma").as_double() * bases.gamma_base);
      } else {
        throw std::invalid_argument("unknown affinity: " + affinity);
      }
      return detail::spectral_from_affinity(W, bound_k(cfg, n), algo_seed);
    }
    case Algorithm::MeanShift: {
      ScaleBases bases = scale_bases(X, Metric::euclidean, 2000, scale_seed);
      double bandwidth_abs = cfg.at("bandwidth").as_double() * bases.eps_base;
      return detail::mean_shift(X, bandwidth_abs, cfg.at("min_bin_freq").as_int());
    }
    case Algorithm::kPC:
      return detail::k_plane(X, bound_k(cfg, n), cfg.at("d").as_int(), algo_seed);
    case Algorithm::SSC:
      return detail::ssc(X, bound_k(cfg, n), cfg.at("lambda").as_double(), algo_seed);
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace clubench
