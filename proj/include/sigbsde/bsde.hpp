#pragma once

// Backward Euler-Maruyama scheme for
//   Y_t = g(X_T) + int_t^T f(s, X_s, Y_s, Z_s) ds - int_t^T Z_s dB_s
// with every conditional expectation estimated by signature regression.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>

#include "sigbsde/ce_sig.hpp"
#include "sigbsde/simulate.hpp"

namespace sigbsde {

struct DriverSpec {
  using Rule = std::function<double(double t, double x, double y, double z)>;

  std::string name;
  Rule evaluate;
  bool lipschitz = true;

  double operator()(double t, double x, double y, double z) const { return evaluate(t, x, y, z); }
};

enum class Scheme { kExplicit, kImplicit };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

/// kPlain regresses Y_{k+1} dB_{k+1} / dt. kCentered first subtracts the
/// estimate of E_k[Y_{k+1}], which leaves the conditional mean unchanged but
/// removes most of the regression noise. kCentered is the default: under a
/// quadratic driver the plain noise feeds back into Y and can diverge.
enum class ZEstimator { kPlain, kCentered };

ZEstimator parse_z_estimator(const std::string& name);
std::string to_string(ZEstimator estimator);

struct SolverConfig {
  CeConfig ce;
  Scheme scheme = Scheme::kExplicit;
  int picard_iters = 10;
  double picard_tol = 1e-10;
  ZEstimator z_estimator = ZEstimator::kCentered;
};

struct BsdeSolution {
  PathMatrix y;  // samples x (steps + 1)
  PathMatrix z;  // samples x steps
  PathBatch x;   // forward process
  TimeGrid grid;
  CeConfig config;
  std::uint64_t seed = 0;
  /// Implicit scheme only: false if some step hit picard_iters before tol.
  bool picard_converged = true;
  /// Grid indices whose regression fell back to the minimal ridge penalty.
  int fallback_steps = 0;
};

/// Explicit scheme: for k = N-1, ..., 0
///   Z_k = E_k[Y_{k+1} dB_{k+1}] / dt,
///   Y_k = E_k[Y_{k+1} + f(t_k, X_k, Y_{k+1}, Z_k) dt].
BsdeSolution solve_explicit(const Eigen::VectorXd& terminal, const DriverSpec& driver,
                            const PathBatch& x, const PathBatch& b, const CeConfig& cfg);

/// Implicit scheme: Y_k solves y = E_k[Y_{k+1} + f(t_k, X_k, y, Z_k) dt],
/// found by Picard iteration started from the explicit update.
BsdeSolution solve_implicit_picard(const Eigen::VectorXd& terminal, const DriverSpec& driver,
                                   const PathBatch& x, const PathBatch& b, const CeConfig& cfg,
                                   int picard_iters, double tol);

/// Variants reusing signature features already computed for b at cfg.depth.
BsdeSolution solve(const Eigen::VectorXd& terminal, const DriverSpec& driver, const PathBatch& x,
                   const PathBatch& b, const SignatureFeatures& features,
                   const SolverConfig& cfg);
BsdeSolution solve(const Eigen::VectorXd& terminal, const DriverSpec& driver, const PathBatch& x,
                   const PathBatch& b, const SolverConfig& cfg);

/// CSV with header `sample,k,t,X,Y,Z`; Z is empty at k = N.
void write_solution_csv(std::ostream& os, const BsdeSolution& solution,
                        Eigen::Index max_samples = std::numeric_limits<Eigen::Index>::max());

}  // namespace sigbsde
