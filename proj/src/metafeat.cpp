#include "clubench/metafeat.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "clubench/algorithms.hpp"
#include "clubench/csv.hpp"
#include "clubench/metrics.hpp"
#include "clubench/rng.hpp"

namespace clubench {

void MetaVector::append(const MetaVector& other) {
  values.insert(values.end(), other.values.begin(), other.values.end());
  manifest.insert(manifest.end(), other.manifest.begin(), other.manifest.end());
}

namespace {

constexpr const char* kStatTag = "statistical";
constexpr const char* kLandmarkTag = "landmarker_kmeans";

struct Builder {
  MetaVector mv;
  void emit(const std::string& name, const char* tag, double value, bool imputed = false) {
    if (!std::isfinite(value)) {
      value = 0.0;
      imputed = true;
    }
    mv.values.push_back(value);
    mv.manifest.push_back({name, tag, imputed, false});
  }
};

double percentile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double pos = q / 100.0 * static_cast<double>(n - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  if (lo >= n - 1) return sorted[n - 1];
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct Moments {
  double mean = 0, var = 0, std = 0;  // population
  double m3 = 0, m4 = 0;
  double skewness = 0, kurtosis = 0;  // m3/std^3, m4/var^2
  bool degenerate = false;            // zero variance
};

Moments moments(const std::vector<double>& x) {
  Moments mo;
  const double n = static_cast<double>(x.size());
  for (double v : x) mo.mean += v;
  mo.mean /= n;
  for (double v : x) {
    double d = v - mo.mean;
    mo.var += d * d;
    mo.m3 += d * d * d;
    mo.m4 += d * d * d * d;
  }
  mo.var /= n;
  mo.m3 /= n;
  mo.m4 /= n;
  mo.std = std::sqrt(mo.var);
  if (mo.var > 0) {
    mo.skewness = mo.m3 / (mo.std * mo.std * mo.std);
    mo.kurtosis = mo.m4 / (mo.var * mo.var);
  } else {
    mo.degenerate = true;
  }
  return mo;
}

// the six-fold aggregation used for the matrix-valued blocks
void agg6(Builder& b, const std::string& prefix, const std::vector<double>& values,
          bool forced_impute = false) {
  static const char* suffix[6] = {"min", "max", "mean", "std", "skewness", "kurtosis"};
  if (values.empty() || forced_impute) {
    for (const char* s : suffix) b.emit(prefix + "_" + s, kStatTag, 0.0, true);
    return;
  }
  Moments mo = moments(values);
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  b.emit(prefix + "_min", kStatTag, lo);
  b.emit(prefix + "_max", kStatTag, hi);
  b.emit(prefix + "_mean", kStatTag, mo.mean);
  b.emit(prefix + "_std", kStatTag, mo.std);
  b.emit(prefix + "_skewness", kStatTag, mo.degenerate ? 0.0 : mo.skewness, mo.degenerate);
  b.emit(prefix + "_kurtosis", kStatTag, mo.degenerate ? 0.0 : mo.kurtosis, mo.degenerate);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// D'Agostino K^2 omnibus test; true = normality rejected at alpha
bool normality_rejected(const Moments& mo, int n, double alpha) {
  if (n < 8 || mo.degenerate) return false;
  const double nd = static_cast<double>(n);

  // skewness z-transform (D'Agostino 1970)
  double g1 = mo.skewness;
  double y = g1 * std::sqrt((nd + 1.0) * (nd + 3.0) / (6.0 * (nd - 2.0)));
  double beta2 = 3.0 * (nd * nd + 27.0 * nd - 70.0) * (nd + 1.0) * (nd + 3.0) /
                 ((nd - 2.0) * (nd + 5.0) * (nd + 7.0) * (nd + 9.0));
  double w2 = -1.0 + std::sqrt(2.0 * (beta2 - 1.0));
  double delta = 1.0 / std::sqrt(0.5 * std::log(w2));
  double alpha_s = std::sqrt(2.0 / (w2 - 1.0));
  double ya = y / alpha_s;
  double z1 = delta * std::log(ya + std::sqrt(ya * ya + 1.0));

  // kurtosis z-transform (Anscombe-Glynn 1983)
  double b2 = mo.kurtosis;
  double eb2 = 3.0 * (nd - 1.0) / (nd + 1.0);
  double vb2 = 24.0 * nd * (nd - 2.0) * (nd - 3.0) / ((nd + 1.0) * (nd + 1.0) * (nd + 3.0) * (nd + 5.0));
  double x = (b2 - eb2) / std::sqrt(vb2);
  double sqrtbeta1 = 6.0 * (nd * nd - 5.0 * nd + 2.0) / ((nd + 7.0) * (nd + 9.0)) *
                     std::sqrt(6.0 * (nd + 3.0) * (nd + 5.0) / (nd * (nd - 2.0) * (nd - 3.0)));
  double a = 6.0 + 8.0 / sqrtbeta1 * (2.0 / sqrtbeta1 + std::sqrt(1.0 + 4.0 / (sqrtbeta1 * sqrtbeta1)));
  double term1 = 1.0 - 2.0 / (9.0 * a);
  double denom = 1.0 + x * std::sqrt(2.0 / (a - 4.0));
  double z2;
  if (denom == 0.0) {
    z2 = 0.0;
  } else {
    double term2 = std::copysign(std::cbrt((1.0 - 2.0 / a) / std::abs(denom)), denom);
    z2 = (term1 - term2) / std::sqrt(2.0 / (9.0 * a));
  }

  double k2 = z1 * z1 + z2 * z2;
  double p = std::exp(-0.5 * k2);  // chi-square survival, 2 dof
  return p < alpha;
}

double gini_coefficient(std::vector<double> x) {
  double lo = *std::min_element(x.begin(), x.end());
  for (double& v : x) v -= lo;
  double total = std::accumulate(x.begin(), x.end(), 0.0);
  if (total <= 0.0) return 0.0;
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double weighted = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) weighted += static_cast<double>(i + 1) * x[i];
  return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

double histogram_entropy_bits(const std::vector<double>& x, int bins) {
  double lo = *std::min_element(x.begin(), x.end());
  double hi = *std::max_element(x.begin(), x.end());
  if (hi <= lo) return 0.0;
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (double v : x) {
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    counts[static_cast<std::size_t>(b)]++;
  }
  double h = 0.0;
  const double n = static_cast<double>(x.size());
  for (int c : counts) {
    if (c == 0) continue;
    double p = c / n;
    h -= p * std::log2(p);
  }
  return h;
}

// indices that sort rows lexicographically; makes every seeded sub-procedure
// invariant to the input row order
std::vector<int> canonical_row_order(const Eigen::MatrixXd& X) {
  std::vector<int> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&X](int a, int b) {
    for (int j = 0; j < X.cols(); ++j) {
      if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
    }
    return false;
  });
  return order;
}

Eigen::MatrixXd sorted_rows(const Eigen::MatrixXd& X) {
  std::vector<int> order = canonical_row_order(X);
  Eigen::MatrixXd out(X.rows(), X.cols());
  for (int i = 0; i < X.rows(); ++i) out.row(i) = X.row(order[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<int> landmark_partition(const Eigen::MatrixXd& sorted_x, int k, std::uint64_t seed) {
  KMeansOptions opts;
  opts.k = k;
  opts.init = KMeansInit::kmeanspp;
  opts.metric = Metric::euclidean;
  opts.n_init = 10;
  opts.max_iter = 500;
  return kmeans(sorted_x, opts, seed).labels;
}

std::uint64_t landmark_seed(std::uint64_t seed, int k) {
  Rng rng(seed);
  return rng.fork(1000 + static_cast<std::uint64_t>(k));
}

}  // namespace

MetaVector statistical_features(const Dataset& d, std::uint64_t seed) {
  const Eigen::MatrixXd& X = d.X;
  const int n = d.n();
  const int p = d.m();
  const double nd = n, pd = p;

  Builder b;
  b.emit("n", kStatTag, nd);
  b.emit("p", kStatTag, pd);
  b.emit("p_over_n", kStatTag, pd / nd);
  b.emit("log_n", kStatTag, std::log(nd));
  b.emit("log_p", kStatTag, std::log(pd));
  b.emit("log_n_over_p", kStatTag, std::log(nd / pd));

  // per-feature scans
  std::vector<double> means(p), medians(p), vars(p), mins(p), maxs(p), stds(p), ranges(p);
  std::vector<double> q1s(p), q25s(p), q75s(p), q99s(p), iqrs(p);
  std::vector<double> norm_means(p), norm_medians(p), ginis(p), mads(p), aads(p), qcds(p), cvs(p);
  std::vector<double> out199(p), out3s(p);
  std::vector<double> cm[6];
  for (auto& v : cm) v.resize(static_cast<std::size_t>(p));
  std::vector<double> skews, kurts, sparsities, entropies;
  bool imputed_norm_mean = false, imputed_qcd = false, imputed_cv = false;
  bool any_moment_degenerate = false;
  int normality_rejections = 0;
  const bool normality_usable = n >= 8;

  std::vector<double> col(static_cast<std::size_t>(n));
  for (int j = 0; j < p; ++j) {
    for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = X(i, j);
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());

    Moments mo = moments(col);
    const std::size_t js = static_cast<std::size_t>(j);
    means[js] = mo.mean;
    medians[js] = percentile(sorted, 50);
    vars[js] = mo.var;
    stds[js] = mo.std;
    mins[js] = sorted.front();
    maxs[js] = sorted.back();
    ranges[js] = sorted.back() - sorted.front();
    q1s[js] = percentile(sorted, 1);
    q25s[js] = percentile(sorted, 25);
    q75s[js] = percentile(sorted, 75);
    q99s[js] = percentile(sorted, 99);
    iqrs[js] = q75s[js] - q25s[js];

    if (maxs[js] != 0.0) {
      norm_means[js] = mo.mean / maxs[js];
      norm_medians[js] = medians[js] / maxs[js];
    } else {
      norm_means[js] = 0.0;
      norm_medians[js] = 0.0;
      imputed_norm_mean = true;
    }

    ginis[js] = gini_coefficient(col);

    std::vector<double> absdev(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) absdev[i] = std::abs(col[i] - medians[js]);
    std::vector<double> absdev_sorted = absdev;
    std::sort(absdev_sorted.begin(), absdev_sorted.end());
    mads[js] = percentile(absdev_sorted, 50);
    aads[js] = mean_of(absdev);

    double qsum = q75s[js] + q25s[js];
    if (qsum != 0.0) {
      qcds[js] = iqrs[js] / qsum;
    } else {
      qcds[js] = 0.0;
      imputed_qcd = true;
    }

    if (mo.mean != 0.0) {
      cvs[js] = mo.std / mo.mean;
    } else {
      cvs[js] = 0.0;
      imputed_cv = true;
    }

    int o199 = 0, o3 = 0;
    for (double v : col) {
      if (v < q1s[js] || v > q99s[js]) ++o199;
      if (mo.std > 0 && std::abs(v - mo.mean) > 3.0 * mo.std) ++o3;
    }
    out199[js] = static_cast<double>(o199) / nd;
    out3s[js] = static_cast<double>(o3) / nd;

    if (normality_usable && normality_rejected(mo, n, 0.05)) ++normality_rejections;

    for (int k = 5; k <= 10; ++k) {
      double acc = 0.0;
      for (double v : col) acc += std::pow(v - mo.mean, k);
      cm[k - 5][js] = acc / nd;
    }

    if (mo.degenerate) {
      any_moment_degenerate = true;
    } else {
      skews.push_back(mo.skewness);
      kurts.push_back(mo.kurtosis);
    }

    // distinct values / n
    int unique = 1;
    for (std::size_t i = 1; i < sorted.size(); ++i)
      if (sorted[i] != sorted[i - 1]) ++unique;
    sparsities.push_back(static_cast<double>(unique) / nd);

    entropies.push_back(histogram_entropy_bits(col, 32) / std::log2(nd));
  }

  b.emit("sample_mean", kStatTag, mean_of(means));
  b.emit("sample_median", kStatTag, mean_of(medians));
  b.emit("sample_var", kStatTag, mean_of(vars));
  b.emit("sample_min", kStatTag, mean_of(mins));
  b.emit("sample_max", kStatTag, mean_of(maxs));
  b.emit("sample_std", kStatTag, mean_of(stds));
  b.emit("sample_range", kStatTag, mean_of(ranges));
  b.emit("percentile_q1", kStatTag, mean_of(q1s));
  b.emit("percentile_q25", kStatTag, mean_of(q25s));
  b.emit("percentile_q75", kStatTag, mean_of(q75s));
  b.emit("percentile_q99", kStatTag, mean_of(q99s));
  b.emit("iqr", kStatTag, mean_of(iqrs));
  b.emit("normalized_mean", kStatTag, mean_of(norm_means), imputed_norm_mean);
  b.emit("normalized_median", kStatTag, mean_of(norm_medians), imputed_norm_mean);
  b.emit("gini", kStatTag, mean_of(ginis));
  b.emit("mad", kStatTag, mean_of(mads));
  b.emit("aad", kStatTag, mean_of(aads));
  b.emit("quantile_coeff_dispersion", kStatTag, mean_of(qcds), imputed_qcd);
  b.emit("coeff_variation", kStatTag, mean_of(cvs), imputed_cv);
  b.emit("outlier_frac_1_99", kStatTag, mean_of(out199));
  b.emit("outlier_frac_3std", kStatTag, mean_of(out3s));
  b.emit("normality_reject_frac", kStatTag,
         normality_usable ? static_cast<double>(normality_rejections) / pd : 0.0,
         !normality_usable);
  for (int k = 5; k <= 10; ++k)
    b.emit("central_moment_" + std::to_string(k), kStatTag, mean_of(cm[k - 5]));

  agg6(b, "skewness", skews, skews.empty());
  agg6(b, "kurtosis", kurts, kurts.empty());
  (void)any_moment_degenerate;

  // off-diagonal correlation / covariance entries (upper triangle)
  std::vector<double> corr_entries, cov_entries;
  if (p >= 2) {
    Eigen::RowVectorXd mu = X.colwise().mean();
    Eigen::MatrixXd centered = X.rowwise() - mu;
    Eigen::MatrixXd cov = centered.transpose() * centered / (nd - 1.0);
    for (int a = 0; a < p; ++a) {
      for (int c = a + 1; c < p; ++c) {
        cov_entries.push_back(cov(a, c));
        double denom = std::sqrt(cov(a, a) * cov(c, c));
        corr_entries.push_back(denom > 0 ? cov(a, c) / denom : 0.0);
      }
    }
  }
  agg6(b, "correlation", corr_entries, corr_entries.empty());
  agg6(b, "covariance", cov_entries, cov_entries.empty());

  agg6(b, "sparsity", sparsities);

  // one-way ANOVA per feature against the K=2 landmark partition
  std::vector<double> anova_p;
  {
    Eigen::MatrixXd Xs = sorted_rows(X);
    std::vector<int> groups = landmark_partition(Xs, 2, landmark_seed(seed, 2));
    boost::math::fisher_f fdist(1, std::max(1, n - 2));
    for (int j = 0; j < p; ++j) {
      double mean_all = Xs.col(j).mean();
      double mean_g[2] = {0, 0};
      int count_g[2] = {0, 0};
      for (int i = 0; i < n; ++i) {
        mean_g[groups[static_cast<std::size_t>(i)]] += Xs(i, j);
        count_g[groups[static_cast<std::size_t>(i)]]++;
      }
      for (int g = 0; g < 2; ++g)
        if (count_g[g] > 0) mean_g[g] /= count_g[g];
      double ssb = 0.0, ssw = 0.0;
      for (int g = 0; g < 2; ++g)
        ssb += count_g[g] * (mean_g[g] - mean_all) * (mean_g[g] - mean_all);
      for (int i = 0; i < n; ++i) {
        double dgi = Xs(i, j) - mean_g[groups[static_cast<std::size_t>(i)]];
        ssw += dgi * dgi;
      }
      double pval;
      if (ssw <= 1e-300) {
        pval = ssb > 1e-300 ? 0.0 : 1.0;
      } else {
        double f = ssb / (ssw / (n - 2));
        pval = boost::math::cdf(boost::math::complement(fdist, f));
      }
      anova_p.push_back(pval);
    }
  }
  agg6(b, "anova_pvalue", anova_p);

  // normalized entropy block: min, max, std, mean (fixed order)
  {
    Moments mo = moments(entropies);
    b.emit("norm_entropy_min", kStatTag, *std::min_element(entropies.begin(), entropies.end()));
    b.emit("norm_entropy_max", kStatTag, *std::max_element(entropies.begin(), entropies.end()));
    b.emit("norm_entropy_std", kStatTag, mo.std);
    b.emit("norm_entropy_mean", kStatTag, mo.mean);
  }

  return b.mv;
}

MetaVector landmarker_features(const Dataset& d, const std::vector<int>& k_set,
                               std::uint64_t seed) {
  Builder b;
  Eigen::MatrixXd Xs = sorted_rows(d.X);
  const int n = d.n();
  for (int k : k_set) {
    InternalMetrics im;
    bool usable = (k >= 2 && k <= n - 1 && n >= 3);
    if (usable) {
      try {
        std::vector<int> labels = landmark_partition(Xs, k, landmark_seed(seed, k));
        im = internal_metrics(Xs, labels);
      } catch (const std::exception&) {
        usable = false;
      }
    }
    std::vector<double> vals = im.as_vector();
    const auto& names = InternalMetrics::names();
    for (std::size_t i = 0; i < names.size(); ++i) {
      b.emit("landmark_k" + std::to_string(k) + "_" + names[i], kLandmarkTag,
             usable ? vals[i] : 0.0, !usable);
    }
  }
  return b.mv;
}

MetaVector meta_vector(const Dataset& d, std::uint64_t seed) {
  MetaVector mv = statistical_features(d, seed);
  mv.append(landmarker_features(d, default_landmark_ks(), seed));
  return mv;
}

nlohmann::json manifest_json(const std::vector<MetaCoordinate>& manifest) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : manifest) {
    nlohmann::json item;
    item["name"] = c.name;
    item["formula_tag"] = c.formula_tag;
    item["imputed"] = c.imputed;
    item["order_sensitive"] = c.order_sensitive;
    out.push_back(std::move(item));
  }
  return out;
}

void write_meta_csv(const std::string& path, const std::vector<std::string>& dataset_names,
                    const std::vector<MetaVector>& vectors) {
  if (dataset_names.size() != vectors.size())
    throw std::invalid_argument("write_meta_csv: name/vector count mismatch");
  csv::Table t;
  t.header.push_back("dataset");
  if (!vectors.empty())
    for (const auto& c : vectors.front().manifest) t.header.push_back(c.name);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (i > 0 && vectors[i].manifest.size() != vectors[0].manifest.size())
      throw std::invalid_argument("write_meta_csv: inconsistent manifests");
    std::vector<std::string> row;
    row.push_back(dataset_names[i]);
    for (double v : vectors[i].values) row.push_back(csv::format_double(v));
    t.rows.push_back(std::move(row));
  }
  csv::write(path, t);
}

}  // namespace clubench
