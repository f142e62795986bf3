#include "clubench/demo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "clubench/rng.hpp"

namespace clubench {

Dataset make_blobs(int n, int k, int dim, double separation, double sigma, std::uint64_t seed,
                   const std::string& name) {
  if (n < 2 * k) throw std::invalid_argument("make_blobs: n too small for k");
  Rng rng(seed);
  Eigen::MatrixXd centers(k, dim);
  for (int c = 0; c < k; ++c)
    for (int j = 0; j < dim; ++j) centers(c, j) = rng.normal() * separation;

  Dataset d;
  d.name = name;
  d.X.resize(n, dim);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int c = i % k;  // balanced classes
    y[static_cast<std::size_t>(i)] = c;
    for (int j = 0; j < dim; ++j) d.X(i, j) = centers(c, j) + sigma * rng.normal();
  }
  d.y = std::move(y);
  d.K = k;
  d.validate();
  return d;
}

Dataset make_rings(int n, double inner_radius, double outer_radius, double noise,
                   std::uint64_t seed, const std::string& name) {
  if (n < 4) throw std::invalid_argument("make_rings: n too small");
  Rng rng(seed);
  Dataset d;
  d.name = name;
  d.X.resize(n, 2);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int c = i % 2;
    double r = (c == 0 ? inner_radius : outer_radius) + noise * rng.normal();
    double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    d.X(i, 0) = r * std::cos(theta);
    d.X(i, 1) = r * std::sin(theta);
    y[static_cast<std::size_t>(i)] = c;
  }
  d.y = std::move(y);
  d.K = 2;
  d.validate();
  return d;
}

Dataset make_anisotropic(int n, int k, std::uint64_t seed, const std::string& name) {
  if (n < 2 * k) throw std::invalid_argument("make_anisotropic: n too small for k");
  Rng rng(seed);
  Dataset d;
  d.name = name;
  d.X.resize(n, 2);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int c = 0; c < k; ++c) {
    // stretched gaussian with a per-cluster rotation
    double cx = rng.normal() * 8.0, cy = rng.normal() * 8.0;
    double angle = rng.uniform(0.0, std::numbers::pi);
    double ca = std::cos(angle), sa = std::sin(angle);
    for (int i = c; i < n; i += k) {
      double u = rng.normal() * 2.0;  // long axis
      double v = rng.normal() * 0.3;  // short axis
      d.X(i, 0) = cx + ca * u - sa * v;
      d.X(i, 1) = cy + sa * u + ca * v;
      y[static_cast<std::size_t>(i)] = c;
    }
  }
  d.y = std::move(y);
  d.K = k;
  d.validate();
  return d;
}

std::vector<Dataset> make_demo_datasets(int count, int n_per_dataset, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("make_demo_datasets: count must be >= 1");
  std::vector<Dataset> out;
  out.reserve(static_cast<std::size_t>(count));
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    std::uint64_t s = rng.fork(static_cast<std::uint64_t>(i));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "demo%02d", i);
    std::string name(buf);
    switch (i % 4) {
      case 0:
        out.push_back(make_blobs(n_per_dataset, 3 + (i / 4) % 3, 2 + (i / 4) % 3, 8.0, 0.6, s,
                                 name + "_blobs"));
        break;
      case 1:
        out.push_back(make_rings(n_per_dataset, 1.0, 3.0, 0.05, s, name + "_rings"));
        break;
      case 2:
        out.push_back(make_anisotropic(n_per_dataset, 3, s, name + "_aniso"));
        break;
      default:
        out.push_back(make_blobs(n_per_dataset, 5, 4, 6.0, 1.0, s, name + "_blobs5"));
        break;
    }
  }
  return out;
}

}  // namespace clubench
