#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sigbsde/errors.hpp"
#include "sigbsde/experiment.hpp"

namespace py = pybind11;
using namespace sigbsde;

namespace {

using RowArray = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

PathBatch batch_from_values(const Eigen::MatrixXd& values, double horizon) {
  if (values.cols() < 2) throw ShapeError("paths need at least two grid points");
  PathBatch b;
  b.grid = TimeGrid{horizon, static_cast<int>(values.cols() - 1)};
  b.grid.validate();
  b.values = values;
  b.increments = values.rightCols(values.cols() - 1) - values.leftCols(values.cols() - 1);
  return b;
}

Eigen::VectorXd path_signature(const RowArray& points, int depth) {
  if (points.rows() < 1 || points.cols() < 1) throw ShapeError("signature: empty path");
  AugmentedPath path;
  path.dim = static_cast<int>(points.cols());
  path.points.assign(points.data(), points.data() + points.size());
  const auto pre = prefix_signatures(path, depth);
  return feature_vector(pre.at(pre.size() - 1));
}

py::dict report_dict(const ErrorReport& rep) {
  py::list iterations;
  for (const auto& it : rep.iterations) {
    py::dict d;
    d["iteration"] = it.iteration;
    d["seed"] = it.seed;
    d["erl2_y"] = it.erl2_y ? py::cast(*it.erl2_y) : py::none();
    d["erl2_z"] = it.erl2_z ? py::cast(*it.erl2_z) : py::none();
    d["runtime_s"] = it.runtime_s;
    d["error"] = it.error;
    iterations.append(d);
  }
  py::dict out;
  out["benchmark"] = rep.benchmark;
  out["mean"] = rep.mean;
  out["std"] = rep.std_dev;
  out["runtime_s"] = rep.runtime_s;
  out["oracle_only"] = rep.oracle_only;
  out["failures"] = rep.failures();
  out["iterations"] = iterations;
  return out;
}

py::dict solve_one(const ExperimentConfig& cfg, int iteration) {
  cfg.validate();
  const auto bm = make_benchmark(cfg.benchmark, cfg.params, cfg.horizon);
  IterationOutput out = [&] {
    py::gil_scoped_release release;
    return run_iteration(cfg, bm, iteration_seed(cfg.seed, iteration));
  }();
  py::dict d;
  d["t"] = [&] {
    Eigen::VectorXd t(cfg.steps + 1);
    for (int k = 0; k <= cfg.steps; ++k) t[k] = cfg.grid().time(k);
    return t;
  }();
  d["brownian"] = out.brownian.values;
  d["x"] = out.solution.x.values;
  d["y"] = out.solution.y;
  d["z"] = out.solution.z;
  d["exact_y"] = out.exact_y ? py::cast(*out.exact_y) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_sigbsde, m) {
  m.doc() = "Signature-regression BSDE solver and dynamic risk-measure benchmarks.";

  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("benchmark", &ExperimentConfig::benchmark)
      .def_readwrite("samples", &ExperimentConfig::samples)
      .def_readwrite("steps", &ExperimentConfig::steps)
      .def_readwrite("horizon", &ExperimentConfig::horizon)
      .def_readwrite("depth", &ExperimentConfig::depth)
      .def_readwrite("ridge", &ExperimentConfig::ridge)
      .def_readwrite("normalize_time", &ExperimentConfig::normalize_time)
      .def_readwrite("iterations", &ExperimentConfig::iterations)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def_readwrite("picard_iters", &ExperimentConfig::picard_iters)
      .def_readwrite("picard_tol", &ExperimentConfig::picard_tol)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("dump_samples", &ExperimentConfig::dump_samples)
      .def_property(
          "scheme", [](const ExperimentConfig& c) { return to_string(c.scheme); },
          [](ExperimentConfig& c, const std::string& s) { c.scheme = parse_scheme(s); })
      .def_property(
          "z_estimator", [](const ExperimentConfig& c) { return to_string(c.z_estimator); },
          [](ExperimentConfig& c, const std::string& s) { c.z_estimator = parse_z_estimator(s); })
      .def_property(
          "theta", [](const ExperimentConfig& c) { return c.params.theta; },
          [](ExperimentConfig& c, double v) { c.params.theta = v; })
      .def_property(
          "beta", [](const ExperimentConfig& c) { return c.params.beta; },
          [](ExperimentConfig& c, double v) { c.params.beta = v; })
      .def_property(
          "cir_a", [](const ExperimentConfig& c) { return c.params.cir_speed; },
          [](ExperimentConfig& c, double v) { c.params.cir_speed = v; })
      .def_property(
          "cir_b", [](const ExperimentConfig& c) { return c.params.cir_level; },
          [](ExperimentConfig& c, double v) { c.params.cir_level = v; })
      .def_property(
          "cir_sigma", [](const ExperimentConfig& c) { return c.params.cir_sigma; },
          [](ExperimentConfig& c, double v) { c.params.cir_sigma = v; })
      .def_property(
          "cir_x0", [](const ExperimentConfig& c) { return c.params.cir_x0; },
          [](ExperimentConfig& c, double v) { c.params.cir_x0 = v; })
      .def_property(
          "rate_lower", [](const ExperimentConfig& c) { return c.params.rate_lower; },
          [](ExperimentConfig& c, double v) { c.params.rate_lower = v; })
      .def_property(
          "rate_upper", [](const ExperimentConfig& c) { return c.params.rate_upper; },
          [](ExperimentConfig& c, double v) { c.params.rate_upper = v; })
      .def("validate", &ExperimentConfig::validate);

  m.def("benchmark_names", &benchmark_names);

  m.def("sample_brownian",
        [](Eigen::Index samples, int steps, double horizon, std::uint64_t seed) {
          const auto b = sample_brownian(samples, TimeGrid{horizon, steps}, seed);
          return b.values;
        },
        py::arg("samples"), py::arg("steps"), py::arg("horizon") = 1.0, py::arg("seed") = 0,
        "Brownian paths as a samples x (steps + 1) array.");

  m.def("signature", &path_signature, py::arg("path"), py::arg("depth"),
        "Truncated signature of a piecewise-linear path given as an (n + 1) x d array,\n"
        "flattened in canonical word order (shorter words first, then lexicographic).");

  m.def("conditional_expectation",
        [](const Eigen::VectorXd& targets, const Eigen::MatrixXd& brownian, int k, int depth,
           double ridge, double horizon) {
          const auto b = batch_from_values(brownian, horizon);
          const SignatureFeatures features(b, depth);
          return conditional_expectation(targets, features, k, CeConfig{depth, ridge});
        },
        py::arg("targets"), py::arg("brownian"), py::arg("k"), py::arg("depth") = 3,
        py::arg("ridge") = 0.3, py::arg("horizon") = 1.0,
        "Ridge-on-signature estimate of E[targets | F_{t_k}] for each sample.");

  m.def("erl2", &erl2, py::arg("approx"), py::arg("exact"), py::arg("dt"));

  m.def("run_experiment",
        [](const ExperimentConfig& cfg) {
          ErrorReport rep;
          {
            py::gil_scoped_release release;
            rep = run_experiment(cfg);
          }
          return report_dict(rep);
        },
        py::arg("config"));

  m.def("solve_benchmark", &solve_one, py::arg("config"), py::arg("iteration") = 0,
        "Solves one iteration and returns the time grid, paths, Y, Z and the exact Y.");
}
