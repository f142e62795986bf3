#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clubench/algorithms.hpp"
#include "clubench/dataset.hpp"
#include "clubench/demo.hpp"
#include "clubench/grid.hpp"
#include "clubench/metafeat.hpp"
#include "clubench/metrics.hpp"
#include "clubench/perfmatrix.hpp"
#include "clubench/selector.hpp"

#include <json.hpp>

namespace py = pybind11;
using namespace clubench;

namespace {

AlgorithmConfig config_from_py(const std::string& algorithm, const py::dict& params,
                               std::optional<int> k) {
  AlgorithmConfig cfg;
  cfg.algorithm = algorithm_from_string(algorithm);
  for (auto item : params) {
    std::string name = py::cast<std::string>(item.first);
    ParamValue value;
    if (py::isinstance<py::str>(item.second)) {
      value = ParamValue::str(py::cast<std::string>(item.second));
    } else if (py::isinstance<py::bool_>(item.second)) {
      value = ParamValue::integer(py::cast<bool>(item.second) ? 1 : 0);
    } else if (py::isinstance<py::int_>(item.second)) {
      value = ParamValue::integer(py::cast<long>(item.second));
    } else {
      value = ParamValue::real(py::cast<double>(item.second));
    }
    cfg.params.emplace_back(std::move(name), std::move(value));
  }
  cfg.k = k;
  return cfg;
}

py::dict internal_metrics_dict(const InternalMetrics& im) {
  py::dict d;
  const auto& names = InternalMetrics::names();
  auto values = im.as_vector();
  for (std::size_t i = 0; i < names.size(); ++i) d[py::str(names[i])] = values[i];
  return d;
}

}  // namespace

PYBIND11_MODULE(_clubench, m) {
  m.doc() = "Clustering benchmark core: algorithms, metrics, sweeps, matrix completion, "
            "meta-features, and model selection";

  py::register_exception<ClusteringFailure>(m, "ClusteringFailure");

  // ----- metrics -----
  m.def("clustering_accuracy", &clustering_accuracy, py::arg("y_true"), py::arg("y_pred"),
        "Optimal-assignment clustering accuracy in [0, 1].");
  m.def("nmi", &nmi, py::arg("y_true"), py::arg("y_pred"),
        "Normalized mutual information (arithmetic-mean normalizer).");
  m.def("ari", &ari, py::arg("y_true"), py::arg("y_pred"), "Adjusted Rand index.");
  m.def(
      "internal_metrics",
      [](const Eigen::MatrixXd& X, const std::vector<int>& labels) {
        return internal_metrics_dict(internal_metrics(X, labels));
      },
      py::arg("X"), py::arg("labels"),
      "Silhouette/CHI/DBI/SSE statistics of a hard partition as a dict.");

  // ----- clustering -----
  m.def(
      "fit_predict",
      [](const std::string& algorithm, const py::dict& params, const Eigen::MatrixXd& X,
         std::optional<int> k, std::uint64_t seed) {
        return fit_predict(config_from_py(algorithm, params, k), X, seed);
      },
      py::arg("algorithm"), py::arg("params"), py::arg("X"), py::arg("k") = std::nullopt,
      py::arg("seed") = 0,
      "Run one algorithm configuration; returns labels 0..C-1.");
  m.def(
      "fit_predict_config",
      [](const std::string& config_id_str, const Eigen::MatrixXd& X, std::optional<int> k,
         std::uint64_t seed) {
        AlgorithmConfig cfg = config_from_id(config_id_str);
        cfg.k = k;
        return fit_predict(cfg, X, seed);
      },
      py::arg("config_id"), py::arg("X"), py::arg("k") = std::nullopt, py::arg("seed") = 0,
      "Run a configuration given by its canonical id string.");
  m.def(
      "scale_bases",
      [](const Eigen::MatrixXd& X, const std::string& metric, int cap, std::uint64_t seed) {
        ScaleBases b = scale_bases(X, metric_from_string(metric), cap, seed);
        return py::make_tuple(b.eps_base, b.gamma_base);
      },
      py::arg("X"), py::arg("metric") = "euclidean", py::arg("sample_cap") = 2000,
      py::arg("seed") = 0, "(eps_base, gamma_base) for a data matrix.");
  m.def(
      "pairwise_distance",
      [](const Eigen::MatrixXd& X, const std::string& metric) {
        return pairwise_distance(X, metric_from_string(metric));
      },
      py::arg("X"), py::arg("metric") = "euclidean");
  m.def("algorithms", [] {
    std::vector<std::string> out;
    for (Algorithm a : algorithm_roster()) out.push_back(to_string(a));
    return out;
  });
  m.def(
      "grid_config_ids",
      [](const std::string& algorithm) {
        return enumerate_grid(algorithm_from_string(algorithm)).config_ids;
      },
      py::arg("algorithm"), "Canonical config ids of the built-in search grid.");

  // ----- performance matrices -----
  m.def("ccr", &ccr, py::arg("P"), py::arg("j"),
        "Cumulative contribution ratio of the top-j singular values.");
  m.def(
      "mcar_mask",
      [](const Eigen::MatrixXd& P, double mr, std::uint64_t seed) -> Mask {
        return mcar_mask(P, mr, seed);
      },
      py::arg("P"), py::arg("mr"), py::arg("seed") = 0,
      "Fixed-count MCAR observation mask (True = observed).");
  m.def(
      "complete",
      [](const Eigen::MatrixXd& P, const Mask& observed, int r, int max_iters, double tol) {
        Factorization f = complete(P, observed, r, max_iters, tol);
        return py::make_tuple(f.U, f.V, f.objective_trace);
      },
      py::arg("P"), py::arg("observed"), py::arg("r") = 60, py::arg("max_iters") = 200,
      py::arg("tol") = 1e-6,
      "Masked low-rank completion; returns (U, V, objective_trace).");
  m.def("mape", &mape, py::arg("P_true"), py::arg("P_hat"), py::arg("eval_mask"),
        py::arg("floor") = 1e-3);
  m.def(
      "ranks_and_tests",
      [](const Eigen::MatrixXd& P) {
        RankReport r = ranks_and_tests(P);
        return py::make_tuple(r.avg_rank, r.p_values);
      },
      py::arg("P"), "(average ranks, paired t-test p-value matrix).");

  // ----- meta-features -----
  m.def(
      "meta_vector",
      [](const Eigen::MatrixXd& X, std::uint64_t seed) {
        Dataset d;
        d.name = "array";
        d.X = X;
        MetaVector mv = meta_vector(d, seed);
        std::vector<std::string> names;
        for (const auto& c : mv.manifest) names.push_back(c.name);
        return py::make_tuple(mv.values, names);
      },
      py::arg("X"), py::arg("seed") = 0,
      "Fixed-order meta-feature vector of a data matrix: (values, names).");

  // ----- selector -----
  py::class_<SelectorModel>(m, "SelectorModel")
      .def("predict",
           [](const SelectorModel& model, const Eigen::VectorXd& z) { return predict(model, z); })
      .def("select",
           [](const SelectorModel& model, const Eigen::VectorXd& z) {
             SelectionOutcome o = predict_and_select(model, z, model.feature_manifest);
             return py::make_tuple(o.column, o.config_id);
           })
      .def("to_json", [](const SelectorModel& model) { return model.to_json().dump(); })
      .def_static("from_json", [](const std::string& text) {
        return SelectorModel::from_json(nlohmann::json::parse(text));
      });
  m.def(
      "fit_selector",
      [](const Eigen::MatrixXd& Z, const Eigen::MatrixXd& P, const Mask& observed,
         std::vector<std::string> features, std::vector<std::string> targets, int trees,
         std::uint64_t seed) {
        SelectorOptions opts;
        opts.trees = trees;
        opts.seed = seed;
        return fit_selector(Z, P, observed, opts, std::move(features), std::move(targets),
                            MetricKind::acc);
      },
      py::arg("Z"), py::arg("P"), py::arg("observed"), py::arg("features"), py::arg("targets"),
      py::arg("trees") = 200, py::arg("seed") = 0,
      "Multi-output regression forest from meta-features to performance vectors.");

  // ----- demo data -----
  m.def(
      "make_blobs",
      [](int n, int k, int dim, double separation, double sigma, std::uint64_t seed) {
        Dataset d = make_blobs(n, k, dim, separation, sigma, seed);
        return py::make_tuple(d.X, *d.y);
      },
      py::arg("n"), py::arg("k"), py::arg("dim") = 2, py::arg("separation") = 8.0,
      py::arg("sigma") = 1.0, py::arg("seed") = 0, "(X, y) gaussian blobs.");
  m.def(
      "make_rings",
      [](int n, double inner, double outer, double noise, std::uint64_t seed) {
        Dataset d = make_rings(n, inner, outer, noise, seed);
        return py::make_tuple(d.X, *d.y);
      },
      py::arg("n"), py::arg("inner_radius") = 1.0, py::arg("outer_radius") = 3.0,
      py::arg("noise") = 0.05, py::arg("seed") = 0, "(X, y) concentric rings.");

  m.attr("__version__") = "0.1.0";
}
