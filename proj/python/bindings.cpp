#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pagets/error.hpp"
#include "pagets/estimator.hpp"
#include "pagets/incremental_model.hpp"
#include "pagets/metrics.hpp"
#include "pagets/persistence.hpp"
#include "pagets/query.hpp"
#include "pagets/synth.hpp"

namespace py = pybind11;
using namespace pagets;

namespace {

TimeSeriesBatch to_batch(Eigen::MatrixXd values, std::vector<std::string> names) {
  TimeSeriesBatch b = TimeSeriesBatch::from_values(std::move(values), std::move(names));
  b.validate();
  return b;
}

QueryOptions options(double confidence, const std::string& method, bool uq) {
  QueryOptions o;
  o.confidence = confidence;
  o.method = parse_interval_method(method);
  o.with_uq = uq;
  return o;
}

py::dict as_dict(const PredictionResult& r) {
  py::dict d;
  d["mean"] = r.mean;
  d["variance"] = r.variance;
  d["lo"] = r.lo;
  d["hi"] = r.hi;
  d["kind"] = std::string(to_string(r.kind));
  d["fallback"] = r.fallback;
  return d;
}

py::dict truth_dict(const SyntheticTruth& s) {
  py::dict d;
  d["observations"] = s.observations.values;
  d["names"] = s.observations.names;
  d["latent_mean"] = s.latent_mean;
  d["latent_var"] = s.latent_var;
  d["kind"] = s.kind;
  return d;
}

ObservationLaw parse_law(const std::string& s) {
  if (s == "gaussian") return ObservationLaw::Gaussian;
  if (s == "bernoulli") return ObservationLaw::Bernoulli;
  if (s == "poisson") return ObservationLaw::Poisson;
  throw Error(ErrorCode::InvalidParams, "unknown observation law '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_pagets, m) {
  m.doc() = "Incremental multivariate Page-matrix time series models";

  static py::exception<Error> error(m, "PagetsError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  py::class_<HyperParams>(m, "HyperParams")
      .def(py::init<>())
      .def_readwrite("T0", &HyperParams::T0)
      .def_readwrite("Tprime", &HyperParams::Tprime)
      .def_readwrite("gamma", &HyperParams::gamma)
      .def_readwrite("L", &HyperParams::L)
      .def_readwrite("k1", &HyperParams::k1)
      .def_readwrite("k2", &HyperParams::k2)
      .def_readwrite("coeff_window", &HyperParams::coeff_window);

  py::class_<PredictionModel>(m, "Model")
      .def(py::init([](std::vector<std::string> names, const HyperParams& hp) {
             return PredictionModel(std::move(names), hp);
           }),
           py::arg("names"), py::arg("hp") = HyperParams{})
      .def("insert", [](PredictionModel& self, const Eigen::MatrixXd& values) {
             TimeSeriesBatch b = to_batch(values, self.names());
             self.insert(b);
           }, "Appends the columns (time steps) of an N x T array; NaN marks missing values.")
      .def_property_readonly("names", &PredictionModel::names)
      .def_property_readonly("length", &PredictionModel::length)
      .def_property_readonly("num_series", &PredictionModel::num_series)
      .def_property_readonly("trained", &PredictionModel::trained)
      .def_property_readonly("submodel_count", [](const PredictionModel& s) { return s.submodels().size(); })
      .def_property_readonly("retrain_count", [](const PredictionModel& s) { return s.retrain_events().size(); })
      .def("series_index", [](const PredictionModel& s, const std::string& name) { return series_index(s, name); })
      .def("predict", [](const PredictionModel& s, Index n, Index t, double confidence, const std::string& method,
                         bool uq) { return as_dict(predict_point(s, n, t, options(confidence, method, uq))); },
           py::arg("series"), py::arg("t"), py::arg("confidence") = 95.0, py::arg("method") = "gaussian",
           py::arg("uq") = true)
      .def("predict_range",
           [](const PredictionModel& s, Index n, Index t1, Index t2, double confidence, const std::string& method,
              bool uq) {
             py::list out;
             for (const auto& r : predict_range(s, n, t1, t2, options(confidence, method, uq))) out.append(as_dict(r));
             return out;
           },
           py::arg("series"), py::arg("t1"), py::arg("t2"), py::arg("confidence") = 95.0,
           py::arg("method") = "gaussian", py::arg("uq") = true)
      .def("save", [](const PredictionModel& s, const std::filesystem::path& dir) { save_model(s, dir); });

  m.def("create_model",
        [](const Eigen::MatrixXd& values, std::vector<std::string> names, const HyperParams& hp) {
          return create_model(to_batch(values, std::move(names)), hp);
        },
        py::arg("values"), py::arg("names") = std::vector<std::string>{}, py::arg("hp") = HyperParams{});
  m.def("load_model", [](const std::filesystem::path& dir) { return load_model(dir); });

  m.def("default_rows", &default_rows, py::arg("num_series"), py::arg("length"));
  m.def("impute_mean",
        [](const Eigen::MatrixXd& values, Index L, std::optional<Index> k) {
          return impute_mean(to_batch(values, {}), L, k).estimate;
        },
        py::arg("values"), py::arg("L"), py::arg("k") = py::none());
  m.def("impute_variance",
        [](const Eigen::MatrixXd& values, Index L) {
          auto v = impute_variance(to_batch(values, {}), L);
          return py::make_tuple(v.mean, v.variance);
        },
        py::arg("values"), py::arg("L"));
  m.def("forecast_coefficients",
        [](const Eigen::MatrixXd& values, Index L, std::optional<Index> k) {
          return fit_forecaster(to_batch(values, {}), L, k).beta;
        },
        py::arg("values"), py::arg("L"), py::arg("k") = py::none());

  m.def("nrmse", [](const std::vector<double>& p, const std::vector<double>& t) { return nrmse(p, t); });
  m.def("r_squared", [](const std::vector<double>& p, const std::vector<double>& t) { return r_squared(p, t); });
  m.def("wbc", [](const Eigen::MatrixXd& errors) {
    ExperimentGrid g;
    for (Index a = 0; a < errors.rows(); ++a) g.algorithms.push_back("a" + std::to_string(a));
    for (Index x = 0; x < errors.cols(); ++x) g.experiments.push_back("x" + std::to_string(x));
    g.errors = errors;
    return wbc(g);
  });

  m.def("synthetic_I",
        [](std::uint64_t seed, Index n, Index mm, Index T, double noise_sd, double missing_prob) {
          SynthIParams p;
          p.n = n;
          p.m = mm;
          p.T = T;
          p.noise_sd = noise_sd;
          p.missing_prob = missing_prob;
          return truth_dict(gen_synthetic_I(p, seed));
        },
        py::arg("seed"), py::arg("n") = 20, py::arg("m") = 20, py::arg("T") = 15000, py::arg("noise_sd") = 0.0,
        py::arg("missing_prob") = 0.0);
  m.def("synthetic_II",
        [](std::uint64_t seed, int q, const std::string& law, Index n, Index mm, Index T) {
          SynthIIParams p;
          p.n = n;
          p.m = mm;
          p.T = T;
          return truth_dict(gen_synthetic_II_arm(p, seed, q, parse_law(law)));
        },
        py::arg("seed"), py::arg("q") = 1, py::arg("law") = "gaussian", py::arg("n") = 20, py::arg("m") = 20,
        py::arg("T") = 15000);
  m.def("synthetic_III",
        [](std::uint64_t seed, Index T) {
          SynthIIIParams p;
          p.T = T;
          py::list out;
          for (const auto& s : gen_synthetic_III(p, seed)) out.append(truth_dict(s));
          return out;
        },
        py::arg("seed"), py::arg("T") = 100000);
}
