#include "sigbsde/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sigbsde/errors.hpp"

namespace sigbsde {
namespace {

PathBatch identity_forward(const PathBatch& b) { return b; }

}  // namespace

Eigen::VectorXd Benchmark::terminal_values(const PathBatch& x) const {
  const int n = x.steps();
  Eigen::VectorXd out(x.samples());
  for (Eigen::Index j = 0; j < x.samples(); ++j) out(j) = terminal(x.values(j, n));
  return out;
}

PathMatrix Benchmark::exact_y_paths(const PathBatch& x) const {
  if (!exact_y) throw PreconditionError("benchmark " + name + " has no closed-form Y");
  PathMatrix out(x.samples(), x.steps() + 1);
  for (int k = 0; k <= x.steps(); ++k) {
    const double t = x.grid.time(k);
    for (Eigen::Index j = 0; j < x.samples(); ++j) out(j, k) = exact_y(t, x.values(j, k));
  }
  return out;
}

PathMatrix Benchmark::exact_z_paths(const PathBatch& x) const {
  if (!exact_z) throw PreconditionError("benchmark " + name + " has no closed-form Z");
  PathMatrix out(x.samples(), x.steps());
  for (int k = 0; k < x.steps(); ++k) {
    const double t = x.grid.time(k);
    for (Eigen::Index j = 0; j < x.samples(); ++j) out(j, k) = exact_z(t, x.values(j, k));
  }
  return out;
}

double entropic_closed_form(double theta, double t, double b_t, double horizon) {
  return -b_t + theta * (horizon - t) / 2.0;
}

double linear_closed_form(double beta, double t, double b_t, double horizon) {
  const double b2 = beta * beta;
  return std::exp(beta * b_t - b2 * t / 2.0) +
         std::exp(b2 * horizon + 2.0 * beta * b_t - 2.0 * b2 * t) -
         std::exp(2.0 * beta * b_t - b2 * t);
}

double linear_source(double beta, double t, double b_t) {
  return beta * beta * std::exp(2.0 * beta * b_t - beta * beta * t);
}

double cir_bond_price(double speed, double level, double sigma, double tau, double rate) {
  if (tau <= 0.0) return 1.0;
  if (sigma == 0.0) {
    // Deterministic rate b + (rate - b) e^{-a s}, integrated over [0, tau].
    const double integral = level * tau + (rate - level) * (1.0 - std::exp(-speed * tau)) / speed;
    return std::exp(-integral);
  }
  const double gamma = std::sqrt(speed * speed + 2.0 * sigma * sigma);
  const double growth = std::expm1(gamma * tau);
  const double denom = (gamma + speed) * growth + 2.0 * gamma;
  const double a_factor = std::pow(2.0 * gamma * std::exp((gamma + speed) * tau / 2.0) / denom,
                                   2.0 * speed * level / (sigma * sigma));
  const double b_factor = 2.0 * growth / denom;
  return a_factor * std::exp(-b_factor * rate);
}

double constant_beta_reference(double beta, double t, double b_t, double horizon) {
  return -std::exp(-beta * (horizon - t)) * b_t;
}

Benchmark entropic_benchmark(double theta, double horizon) {
  if (!(theta > 0.0)) throw PreconditionError("entropic benchmark: theta must be positive");
  Benchmark bm;
  bm.name = "entropic";
  bm.horizon = horizon;
  bm.params.theta = theta;
  // dY = -(theta/2) Z^2 dt + Z dB, i.e. f(z) = (theta/2) z^2 under the -f dt convention.
  bm.driver = DriverSpec{"entropic",
                         [theta](double, double, double, double z) { return 0.5 * theta * z * z; },
                         false};
  bm.forward = identity_forward;
  bm.terminal = [](double x) { return -x; };
  bm.exact_y = [theta, horizon](double t, double b) {
    return entropic_closed_form(theta, t, b, horizon);
  };
  bm.exact_z = [](double, double) { return -1.0; };
  return bm;
}

Benchmark linear_benchmark(double beta, double horizon) {
  if (beta == 0.0 || !std::isfinite(beta)) {
    throw PreconditionError("linear benchmark: beta must be nonzero and finite");
  }
  Benchmark bm;
  bm.name = "linear";
  bm.horizon = horizon;
  bm.params.beta = beta;
  bm.driver = DriverSpec{"linear-source",
                         [beta](double t, double x, double, double) {
                           return linear_source(beta, t, x);
                         },
                         true};
  bm.forward = identity_forward;
  bm.terminal = [beta, horizon](double x) {
    return std::exp(beta * x - beta * beta * horizon / 2.0);
  };
  bm.exact_y = [beta, horizon](double t, double b) {
    return linear_closed_form(beta, t, b, horizon);
  };
  bm.exact_z = [beta, horizon](double t, double b) {
    const double b2 = beta * beta;
    return beta * std::exp(beta * b - b2 * t / 2.0) +
           2.0 * beta * std::exp(b2 * horizon + 2.0 * beta * b - 2.0 * b2 * t) -
           2.0 * beta * std::exp(2.0 * beta * b - b2 * t);
  };
  return bm;
}

Benchmark cir_benchmark(double speed, double level, double sigma, double x0, double horizon) {
  if (!(speed > 0.0 && level > 0.0 && sigma > 0.0 && x0 > 0.0)) {
    throw PreconditionError("cir benchmark: a, b, sigma, x0 must be positive");
  }
  Benchmark bm;
  bm.name = "cir";
  bm.horizon = horizon;
  bm.params.cir_speed = speed;
  bm.params.cir_level = level;
  bm.params.cir_sigma = sigma;
  bm.params.cir_x0 = x0;
  // Y_t = 1 - int_t^T beta_s Y_s ds - int_t^T Z_s dB_s
  bm.driver = DriverSpec{"cir-discount", [](double, double x, double y, double) { return -x * y; },
                         false};
  bm.forward = [=](const PathBatch& b) {
    return cir_full_truncation(speed, level, sigma, x0, b);
  };
  bm.terminal = [](double) { return 1.0; };
  bm.exact_y = [=](double t, double x) {
    return cir_bond_price(speed, level, sigma, horizon - t, x);
  };
  bm.exact_z = [=](double t, double x) {
    const double tau = horizon - t;
    const double gamma = std::sqrt(speed * speed + 2.0 * sigma * sigma);
    const double growth = std::expm1(gamma * tau);
    const double b_factor = 2.0 * growth / ((gamma + speed) * growth + 2.0 * gamma);
    return -b_factor * sigma * std::sqrt(std::max(x, 0.0)) *
           cir_bond_price(speed, level, sigma, tau, x);
  };
  return bm;
}

double optimal_rate(double y, double rate_lower, double rate_upper) {
  return y < 0.0 ? rate_upper : rate_lower;
}

DriverSpec ambiguous_driver(double rate_lower, double rate_upper) {
  if (!(rate_lower >= 0.0) || !(rate_lower <= rate_upper)) {
    throw PreconditionError("ambiguous driver: need 0 <= r <= R");
  }
  return DriverSpec{"ambiguous-analytic",
                    [rate_lower, rate_upper](double, double, double y, double) {
                      return -optimal_rate(y, rate_lower, rate_upper) * y;
                    },
                    true};
}

Benchmark ambiguous_benchmark(double rate_lower, double rate_upper, double horizon) {
  Benchmark bm;
  bm.name = "ambiguous";
  bm.horizon = horizon;
  bm.params.rate_lower = rate_lower;
  bm.params.rate_upper = rate_upper;
  bm.driver = ambiguous_driver(rate_lower, rate_upper);
  bm.forward = identity_forward;
  bm.terminal = [](double x) { return -x; };
  return bm;
}

Benchmark make_benchmark(const std::string& name, const BenchmarkParams& p, double horizon) {
  if (name == "linear") return linear_benchmark(p.beta, horizon);
  if (name == "entropic") return entropic_benchmark(p.theta, horizon);
  if (name == "cir") return cir_benchmark(p.cir_speed, p.cir_level, p.cir_sigma, p.cir_x0, horizon);
  if (name == "ambiguous") return ambiguous_benchmark(p.rate_lower, p.rate_upper, horizon);
  throw PreconditionError("unknown benchmark '" + name +
                          "' (expected linear, entropic, cir or ambiguous)");
}

std::vector<std::string> benchmark_names() { return {"linear", "entropic", "cir", "ambiguous"}; }

OracleEstimate linear_oracle_adjoint(double alpha, double beta_coef,
                                     const std::function<double(double, double)>& phi,
                                     const std::function<double(double)>& payoff, double t,
                                     double b_t, double horizon, const AdjointOracleConfig& cfg) {
  if (!(t >= 0.0 && t <= horizon)) throw PreconditionError("adjoint oracle: need 0 <= t <= T");
  if (cfg.samples < 2 || cfg.steps < 1) {
    throw PreconditionError("adjoint oracle: need >= 2 samples and >= 1 step");
  }
  if (t == horizon) return {payoff(b_t), 0.0};

  const double h = (horizon - t) / cfg.steps;
  const double sd = std::sqrt(h);
  const double log_drift = (alpha - 0.5 * beta_coef * beta_coef) * h;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (Eigen::Index j = 0; j < cfg.samples; ++j) {
    SplitMix64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(j)));
    std::normal_distribution<double> normal(0.0, sd);
    double b = b_t;
    double gamma = 1.0;
    double integral = 0.5 * h * phi(t, b);
    for (int i = 1; i <= cfg.steps; ++i) {
      const double db = normal(rng);
      gamma *= std::exp(log_drift + beta_coef * db);
      b += db;
      const double weight = i == cfg.steps ? 0.5 : 1.0;
      integral += weight * h * gamma * phi(t + i * h, b);
    }
    const double value = gamma * payoff(b) + integral;
    sum += value;
    sum_sq += value * value;
  }
  const double m = static_cast<double>(cfg.samples);
  const double mean = sum / m;
  const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
  return {mean, std::sqrt(var / m)};
}

RiskMeasurePath risk_measure_path(const Eigen::VectorXd& payoff, const DriverSpec& driver,
                                  const PathBatch& x, const PathBatch& b,
                                  const SignatureFeatures& features, const SolverConfig& cfg) {
  BsdeSolution sol = solve(-payoff, driver, x, b, features, cfg);
  PathMatrix rho = sol.y;
  return RiskMeasurePath{std::move(rho), std::move(sol)};
}

RiskMeasurePath risk_measure_path(const Eigen::VectorXd& payoff, const DriverSpec& driver,
                                  const PathBatch& x, const PathBatch& b, const CeConfig& cfg) {
  const SignatureFeatures features(b, cfg.depth, cfg.normalize_time);
  return risk_measure_path(payoff, driver, x, b, features, SolverConfig{cfg});
}

}  // namespace sigbsde
