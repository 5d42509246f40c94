#pragma once

// Benchmark BSDEs with closed-form or oracle solutions, and the dynamic risk
// measure rho_t(X) = Y_t of the BSDE with terminal value -X.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sigbsde/bsde.hpp"
#include "sigbsde/simulate.hpp"

namespace sigbsde {

struct BenchmarkParams {
  double theta = 0.3;       // entropic risk aversion
  double beta = 1.0;        // linear benchmark volatility of the terminal exponential
  double cir_speed = 1.0;   // a
  double cir_level = 1.0;   // b
  double cir_sigma = 1.0;   // sigma
  double cir_x0 = 1.0;      // beta_0
  double rate_lower = 0.0;  // r
  double rate_upper = 1.0;  // R
};

struct Benchmark {
  using StateRule = std::function<double(double t, double x)>;

  std::string name;
  DriverSpec driver;
  /// Maps the Brownian batch to the forward process X.
  std::function<PathBatch(const PathBatch&)> forward;
  /// Terminal condition g(X_T).
  std::function<double(double)> terminal;
  /// Exact Y_t as a function of (t, X_t); empty when only oracle bounds exist.
  StateRule exact_y;
  StateRule exact_z;
  BenchmarkParams params;
  double horizon = 1.0;

  bool has_exact_y() const noexcept { return static_cast<bool>(exact_y); }
  bool has_exact_z() const noexcept { return static_cast<bool>(exact_z); }

  Eigen::VectorXd terminal_values(const PathBatch& x) const;
  PathMatrix exact_y_paths(const PathBatch& x) const;
  PathMatrix exact_z_paths(const PathBatch& x) const;
};

/// rho_t(B_T) = (1/theta) log E[exp(-theta B_T) | F_t] = -B_t + theta (T - t) / 2.
double entropic_closed_form(double theta, double t, double b_t, double horizon);

/// Y_t = e^{beta B_t - beta^2 t/2} + e^{beta^2 T} e^{2 beta B_t - 2 beta^2 t} - e^{2 beta B_t - beta^2 t}.
double linear_closed_form(double beta, double t, double b_t, double horizon);

/// Source term phi_t = beta^2 exp(2 beta B_t - beta^2 t) of the linear benchmark.
double linear_source(double beta, double t, double b_t);

/// CIR zero-coupon bond price A(tau) exp(-B(tau) rate).
double cir_bond_price(double speed, double level, double sigma, double tau, double rate);

/// rho_t(B_T, beta) = -exp(-beta (T - t)) B_t for a constant deterministic rate.
double constant_beta_reference(double beta, double t, double b_t, double horizon);

Benchmark entropic_benchmark(double theta, double horizon = 1.0);
Benchmark linear_benchmark(double beta, double horizon = 1.0);
Benchmark cir_benchmark(double speed, double level, double sigma, double x0,
                        double horizon = 1.0);
/// X = B_T with rates bounded by [r, R]; no closed form.
Benchmark ambiguous_benchmark(double rate_lower, double rate_upper, double horizon = 1.0);

/// f(t, y) = sup_{r <= beta <= R} (-beta y) = -beta_hat(y) y, beta_hat = R 1(y<0) + r 1(y>=0).
DriverSpec ambiguous_driver(double rate_lower, double rate_upper);
double optimal_rate(double y, double rate_lower, double rate_upper);

/// Registry lookup: linear, entropic, cir, ambiguous.
Benchmark make_benchmark(const std::string& name, const BenchmarkParams& params,
                         double horizon = 1.0);
std::vector<std::string> benchmark_names();

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct AdjointOracleConfig {
  Eigen::Index samples = 100000;
  int steps = 200;
  std::uint64_t seed = 1;
};

/// Monte Carlo of Y_t = E[Gamma_{t,T} X + int_t^T Gamma_{t,s} phi_s ds | B_t = b_t]
/// for the linear BSDE dY = -(phi + alpha Y + beta_coef Z) dt + Z dB with
/// constant alpha and beta_coef. Gamma follows d Gamma = Gamma (alpha ds + beta_coef dB)
/// and is sampled exactly on each step; the time integral uses the trapezoidal rule.
OracleEstimate linear_oracle_adjoint(double alpha, double beta_coef,
                                     const std::function<double(double s, double b)>& phi,
                                     const std::function<double(double b_T)>& payoff, double t,
                                     double b_t, double horizon,
                                     const AdjointOracleConfig& cfg = {});

struct RiskMeasurePath {
  PathMatrix rho;  // samples x (steps + 1), rho(., N) = -X
  BsdeSolution solution;
};

/// rho_t(X) := Y_t of the BSDE with terminal -X.
RiskMeasurePath risk_measure_path(const Eigen::VectorXd& payoff, const DriverSpec& driver,
                                  const PathBatch& x, const PathBatch& b,
                                  const SignatureFeatures& features, const SolverConfig& cfg);
RiskMeasurePath risk_measure_path(const Eigen::VectorXd& payoff, const DriverSpec& driver,
                                  const PathBatch& x, const PathBatch& b, const CeConfig& cfg);

}  // namespace sigbsde
