#pragma once

// Experiment harness: path errors, repeated independent runs of a benchmark,
// sample-size studies and the CSV artifacts they produce.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sigbsde/benchmarks.hpp"
#include "sigbsde/bsde.hpp"

namespace sigbsde {

struct ExperimentConfig {
  std::string benchmark = "entropic";
  Eigen::Index samples = 8192;
  int steps = 500;
  double horizon = 1.0;
  int depth = 3;
  double ridge = 0.3;
  bool normalize_time = false;
  int iterations = 50;
  std::uint64_t seed = 2024;
  Scheme scheme = Scheme::kExplicit;
  int picard_iters = 10;
  double picard_tol = 1e-10;
  ZEstimator z_estimator = ZEstimator::kCentered;
  BenchmarkParams params;
  /// Artifacts go to <out_dir>/<benchmark>/; nothing is written when empty.
  std::string out_dir;
  /// Number of samples written to paths.csv for the first iteration.
  Eigen::Index dump_samples = 16;

  void validate() const;
  SolverConfig solver() const;
  TimeGrid grid() const { return TimeGrid{horizon, steps}; }
};

/// sqrt((1/M) sum_j sum_k |approx - exact|^2 dt) over all columns k.
double erl2(const PathMatrix& approx, const PathMatrix& exact, double dt);

struct IterationResult {
  int iteration = 0;
  std::uint64_t seed = 0;
  std::optional<double> erl2_y;
  std::optional<double> erl2_z;
  double runtime_s = 0.0;
  std::string error;  // non-empty when the solver failed
};

struct ErrorReport {
  std::string benchmark;
  std::vector<IterationResult> iterations;
  double mean = 0.0;     // over iterations with an ERL2 value
  double std_dev = 0.0;  // sample standard deviation
  double runtime_s = 0.0;
  bool oracle_only = false;

  std::size_t failures() const;
  std::vector<double> erl2_values() const;
};

/// One fully simulated and solved instance of a benchmark.
struct IterationOutput {
  PathBatch brownian;
  BsdeSolution solution;
  std::optional<PathMatrix> exact_y;
};

std::uint64_t iteration_seed(std::uint64_t base_seed, int iteration);

IterationOutput run_iteration(const ExperimentConfig& cfg, const Benchmark& bm,
                              std::uint64_t seed);

/// Runs cfg.iterations independent solves with derived seeds. Solver failures
/// are recorded per iteration and the experiment continues.
ErrorReport run_experiment(const ExperimentConfig& cfg);
ErrorReport run_experiment(const ExperimentConfig& cfg, const Benchmark& bm);

struct ScalingRow {
  Eigen::Index samples = 0;
  double mean_erl2 = 0.0;
  double std_erl2 = 0.0;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  /// Least-squares slope of log(mean ERL2) against log(M); empty if degenerate.
  std::optional<double> slope;
};

std::optional<double> loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

ScalingStudy scaling_study(const ExperimentConfig& cfg, const std::vector<Eigen::Index>& sample_sizes);

void write_report_csv(std::ostream& os, const ErrorReport& report);
void write_timings_csv(std::ostream& os, const ErrorReport& report);
void write_config(std::ostream& os, const ExperimentConfig& cfg);
void write_scaling_csv(std::ostream& os, const ScalingStudy& study);

/// <out_dir>/<benchmark>, created on demand.
std::filesystem::path artifact_dir(const ExperimentConfig& cfg);

}  // namespace sigbsde
