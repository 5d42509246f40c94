#include "sigbsde/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>

#include "sigbsde/errors.hpp"

namespace sigbsde {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::ofstream open_artifact(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.precision(17);
  return os;
}

}  // namespace

void ExperimentConfig::validate() const {
  make_benchmark(benchmark, params, horizon);
  if (samples < 1) throw PreconditionError("samples must be >= 1");
  if (iterations < 1) throw PreconditionError("iterations must be >= 1");
  grid().validate();
  solver().ce.validate();
  if (picard_iters < 1) throw PreconditionError("picard_iters must be >= 1");
}

SolverConfig ExperimentConfig::solver() const {
  return SolverConfig{CeConfig{depth, ridge, normalize_time}, scheme, picard_iters, picard_tol,
                      z_estimator};
}

double erl2(const PathMatrix& approx, const PathMatrix& exact, double dt) {
  if (approx.rows() != exact.rows() || approx.cols() != exact.cols()) {
    throw ShapeError("erl2: path matrices differ in shape");
  }
  if (approx.rows() < 1) throw ShapeError("erl2: no samples");
  return std::sqrt((approx - exact).squaredNorm() * dt / static_cast<double>(approx.rows()));
}

std::size_t ErrorReport::failures() const {
  return static_cast<std::size_t>(std::count_if(iterations.begin(), iterations.end(),
                                                [](const auto& it) { return !it.error.empty(); }));
}

std::vector<double> ErrorReport::erl2_values() const {
  std::vector<double> out;
  for (const auto& it : iterations) {
    if (it.erl2_y) out.push_back(*it.erl2_y);
  }
  return out;
}

std::uint64_t iteration_seed(std::uint64_t base_seed, int iteration) {
  return derive_seed(base_seed, 0x5EED0000ULL + static_cast<std::uint64_t>(iteration));
}

IterationOutput run_iteration(const ExperimentConfig& cfg, const Benchmark& bm,
                              std::uint64_t seed) {
  PathBatch b = sample_brownian(cfg.samples, cfg.grid(), seed);
  PathBatch x = bm.forward(b);
  const SolverConfig solver = cfg.solver();
  const SignatureFeatures features(b, solver.ce.depth, solver.ce.normalize_time);
  BsdeSolution sol = solve(bm.terminal_values(x), bm.driver, x, b, features, solver);
  std::optional<PathMatrix> exact;
  if (bm.has_exact_y()) exact = bm.exact_y_paths(x);
  return IterationOutput{std::move(b), std::move(sol), std::move(exact)};
}

ErrorReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_experiment(cfg, make_benchmark(cfg.benchmark, cfg.params, cfg.horizon));
}

ErrorReport run_experiment(const ExperimentConfig& cfg, const Benchmark& bm) {
  const auto start = Clock::now();
  ErrorReport report;
  report.benchmark = bm.name;
  report.oracle_only = !bm.has_exact_y();

  std::filesystem::path dir;
  if (!cfg.out_dir.empty()) {
    dir = artifact_dir(cfg);
    auto os = open_artifact(dir / "config.txt");
    write_config(os, cfg);
  }

  const double dt = cfg.grid().dt();
  for (int i = 0; i < cfg.iterations; ++i) {
    const auto iter_start = Clock::now();
    IterationResult res;
    res.iteration = i;
    res.seed = iteration_seed(cfg.seed, i);
    try {
      IterationOutput out = run_iteration(cfg, bm, res.seed);
      if (out.exact_y) res.erl2_y = erl2(out.solution.y, *out.exact_y, dt);
      if (bm.has_exact_z()) res.erl2_z = erl2(out.solution.z, bm.exact_z_paths(out.solution.x), dt);
      if (i == 0 && !dir.empty()) {
        auto os = open_artifact(dir / "paths.csv");
        write_solution_csv(os, out.solution, cfg.dump_samples);
        if (out.exact_y) {
          auto ex = open_artifact(dir / "exact.csv");
          ex << "sample,k,t,Y_exact\n";
          const Eigen::Index m = std::min(out.exact_y->rows(), cfg.dump_samples);
          for (Eigen::Index j = 0; j < m; ++j) {
            for (int k = 0; k <= cfg.steps; ++k) {
              ex << j << ',' << k << ',' << cfg.grid().time(k) << ',' << (*out.exact_y)(j, k)
                 << '\n';
            }
          }
        }
      }
    } catch (const SolverError& e) {
      res.error = e.what();
    } catch (const SimulationError& e) {
      res.error = e.what();
    }
    res.runtime_s = seconds_since(iter_start);
    report.iterations.push_back(std::move(res));
  }

  const auto values = report.erl2_values();
  if (!values.empty()) {
    const double n = static_cast<double>(values.size());
    report.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - report.mean) * (v - report.mean);
    report.std_dev = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  } else {
    report.mean = report.std_dev = std::numeric_limits<double>::quiet_NaN();
  }
  report.runtime_s = seconds_since(start);

  if (!dir.empty()) {
    auto rep = open_artifact(dir / "report.csv");
    write_report_csv(rep, report);
    auto tim = open_artifact(dir / "timings.csv");
    write_timings_csv(tim, report);
    auto sum = open_artifact(dir / "summary.txt");
    sum << "benchmark = " << report.benchmark << "\n"
        << "iterations = " << report.iterations.size() << "\n"
        << "failures = " << report.failures() << "\n";
    if (report.oracle_only) {
      sum << "erl2 = oracle-only\n";
    } else {
      sum << "erl2_mean = " << report.mean << "\nerl2_std = " << report.std_dev << "\n";
    }
    sum << "runtime_s = " << report.runtime_s << "\n";
  }
  return report;
}

std::optional<double> loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ShapeError("loglog_slope: size mismatch");
  if (xs.size() < 2) return std::nullopt;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(ys[i])) return std::nullopt;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(ys[i]) - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

ScalingStudy scaling_study(const ExperimentConfig& cfg,
                           const std::vector<Eigen::Index>& sample_sizes) {
  if (sample_sizes.empty() || !std::is_sorted(sample_sizes.begin(), sample_sizes.end())) {
    throw PreconditionError("scaling_study: sample sizes must be non-empty and ascending");
  }
  ScalingStudy study;
  std::vector<double> xs, ys;
  for (Eigen::Index m : sample_sizes) {
    ExperimentConfig sub = cfg;
    sub.samples = m;
    sub.out_dir.clear();
    const ErrorReport rep = run_experiment(sub);
    study.rows.push_back({m, rep.mean, rep.std_dev});
    xs.push_back(static_cast<double>(m));
    ys.push_back(rep.mean);
  }
  study.slope = loglog_slope(xs, ys);
  if (!cfg.out_dir.empty()) {
    auto os = open_artifact(artifact_dir(cfg) / "scaling.csv");
    write_scaling_csv(os, study);
  }
  return study;
}

void write_report_csv(std::ostream& os, const ErrorReport& report) {
  os.precision(17);
  os << "iteration,seed,erl2_Y,erl2_Z,error\n";
  for (const auto& it : report.iterations) {
    os << it.iteration << ',' << it.seed << ',';
    if (it.erl2_y) {
      os << *it.erl2_y;
    } else if (report.oracle_only && it.error.empty()) {
      os << "oracle-only";
    }
    os << ',';
    if (it.erl2_z) os << *it.erl2_z;
    os << ',';
    if (!it.error.empty()) os << '"' << it.error << '"';
    os << '\n';
  }
}

void write_timings_csv(std::ostream& os, const ErrorReport& report) {
  os.precision(6);
  os << "iteration,runtime_s\n";
  for (const auto& it : report.iterations) os << it.iteration << ',' << it.runtime_s << '\n';
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
  os.precision(17);
  const auto& p = cfg.params;
  os << "benchmark = " << cfg.benchmark << "\n"
     << "samples = " << cfg.samples << "\n"
     << "steps = " << cfg.steps << "\n"
     << "horizon = " << cfg.horizon << "\n"
     << "depth = " << cfg.depth << "\n"
     << "ridge = " << cfg.ridge << "\n"
     << "normalize-time = " << (cfg.normalize_time ? "true" : "false") << "\n"
     << "iterations = " << cfg.iterations << "\n"
     << "seed = " << cfg.seed << "\n"
     << "scheme = " << to_string(cfg.scheme) << "\n"
     << "picard-iters = " << cfg.picard_iters << "\n"
     << "picard-tol = " << cfg.picard_tol << "\n"
     << "z-estimator = " << to_string(cfg.z_estimator) << "\n"
     << "theta = " << p.theta << "\n"
     << "beta = " << p.beta << "\n"
     << "cir-a = " << p.cir_speed << "\n"
     << "cir-b = " << p.cir_level << "\n"
     << "cir-sigma = " << p.cir_sigma << "\n"
     << "cir-x0 = " << p.cir_x0 << "\n"
     << "rate-lower = " << p.rate_lower << "\n"
     << "rate-upper = " << p.rate_upper << "\n";
}

void write_scaling_csv(std::ostream& os, const ScalingStudy& study) {
  os.precision(17);
  os << "samples,mean_erl2,std_erl2\n";
  for (const auto& r : study.rows) os << r.samples << ',' << r.mean_erl2 << ',' << r.std_erl2 << '\n';
  os << "# slope = ";
  if (study.slope) {
    os << *study.slope << '\n';
  } else {
    os << "degenerate\n";
  }
}

std::filesystem::path artifact_dir(const ExperimentConfig& cfg) {
  std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / cfg.benchmark;
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace sigbsde
