#include "sigbsde/bsde.hpp"

#include <cmath>
#include <ostream>

#include "sigbsde/errors.hpp"

namespace sigbsde {

Scheme parse_scheme(const std::string& name) {
  if (name == "explicit") return Scheme::kExplicit;
  if (name == "implicit") return Scheme::kImplicit;
  throw PreconditionError("unknown scheme '" + name + "' (expected explicit or implicit)");
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::kExplicit ? "explicit" : "implicit";
}

ZEstimator parse_z_estimator(const std::string& name) {
  if (name == "plain") return ZEstimator::kPlain;
  if (name == "centered") return ZEstimator::kCentered;
  throw PreconditionError("unknown Z estimator '" + name + "' (expected plain or centered)");
}

std::string to_string(ZEstimator estimator) {
  return estimator == ZEstimator::kPlain ? "plain" : "centered";
}

namespace {

void check_finite(const Eigen::VectorXd& v, int k, const char* what) {
  const auto bad = static_cast<std::size_t>((!v.array().isFinite()).count());
  if (bad > 0) {
    throw SolverError(std::string("non-finite ") + what + " at step " + std::to_string(k) + " in " +
                          std::to_string(bad) + " samples",
                      k, bad);
  }
}

// Regression target Y_{k+1} + f(t_k, X_k, y, Z_k) dt for the given y column.
Eigen::VectorXd driver_target(const DriverSpec& driver, double t, double dt,
                              const Eigen::VectorXd& y_next, const Eigen::VectorXd& y_arg,
                              const Eigen::VectorXd& z, const PathMatrix& x, int k) {
  const Eigen::Index m = y_next.size();
  Eigen::VectorXd target(m);
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < m; ++j) {
    target(j) = y_next(j) + driver(t, x(j, k), y_arg(j), z(j)) * dt;
  }
  return target;
}

}  // namespace

BsdeSolution solve(const Eigen::VectorXd& terminal, const DriverSpec& driver, const PathBatch& x,
                   const PathBatch& b, const SignatureFeatures& features,
                   const SolverConfig& cfg) {
  cfg.ce.validate();
  const Eigen::Index m = b.samples();
  const int n = b.steps();
  if (x.samples() != m || x.steps() != n || terminal.size() != m) {
    throw ShapeError("solve: forward paths, Brownian paths and terminal values disagree in shape");
  }
  if (features.samples() != m || features.steps() != n || features.depth() != cfg.ce.depth) {
    throw ShapeError("solve: signature features do not match the Brownian batch or depth");
  }
  if (!driver.evaluate) throw PreconditionError("solve: driver has no evaluation rule");
  if (cfg.scheme == Scheme::kImplicit && cfg.picard_iters < 1) {
    throw PreconditionError("solve: picard_iters must be >= 1");
  }
  check_finite(terminal, n, "terminal values");

  BsdeSolution sol{PathMatrix(m, n + 1), PathMatrix(m, n), x, b.grid, cfg.ce, b.seed};
  sol.y.col(n) = terminal;
  const double dt = b.grid.dt();

  for (int k = n - 1; k >= 0; --k) {
    const double t = b.grid.time(k);
    const ConditionalExpectation expect(features, k, cfg.ce.lambda);
    if (expect.used_fallback()) ++sol.fallback_steps;

    const Eigen::VectorXd y_next = sol.y.col(k + 1);
    Eigen::VectorXd z_target = y_next;
    if (cfg.z_estimator == ZEstimator::kCentered) z_target -= expect(y_next);
    const Eigen::VectorXd z = expect(z_target.cwiseProduct(b.increments.col(k)) / dt);
    check_finite(z, k, "Z");

    const Eigen::VectorXd target = driver_target(driver, t, dt, y_next, y_next, z, x.values, k);
    check_finite(target, k, "driver values");
    Eigen::VectorXd y = expect(target);
    check_finite(y, k, "Y");

    if (cfg.scheme == Scheme::kImplicit) {
      // The explicit update is the first Picard iterate from y = Y_{k+1}.
      double change = (y - y_next).cwiseAbs().maxCoeff();
      for (int it = 1; it < cfg.picard_iters && !(change < cfg.picard_tol); ++it) {
        const Eigen::VectorXd next_target = driver_target(driver, t, dt, y_next, y, z, x.values, k);
        check_finite(next_target, k, "driver values");
        Eigen::VectorXd y_new = expect(next_target);
        check_finite(y_new, k, "Y");
        change = (y_new - y).cwiseAbs().maxCoeff();
        y = std::move(y_new);
      }
      if (!(change < cfg.picard_tol)) sol.picard_converged = false;
    }

    sol.z.col(k) = z;
    sol.y.col(k) = y;
  }
  return sol;
}

BsdeSolution solve(const Eigen::VectorXd& terminal, const DriverSpec& driver, const PathBatch& x,
                   const PathBatch& b, const SolverConfig& cfg) {
  cfg.ce.validate();
  const SignatureFeatures features(b, cfg.ce.depth, cfg.ce.normalize_time);
  return solve(terminal, driver, x, b, features, cfg);
}

BsdeSolution solve_explicit(const Eigen::VectorXd& terminal, const DriverSpec& driver,
                            const PathBatch& x, const PathBatch& b, const CeConfig& cfg) {
  return solve(terminal, driver, x, b, SolverConfig{cfg, Scheme::kExplicit});
}

BsdeSolution solve_implicit_picard(const Eigen::VectorXd& terminal, const DriverSpec& driver,
                                   const PathBatch& x, const PathBatch& b, const CeConfig& cfg,
                                   int picard_iters, double tol) {
  return solve(terminal, driver, x, b, SolverConfig{cfg, Scheme::kImplicit, picard_iters, tol});
}

void write_solution_csv(std::ostream& os, const BsdeSolution& solution, Eigen::Index max_samples) {
  os << "sample,k,t,X,Y,Z\n";
  const Eigen::Index m = std::min(solution.y.rows(), max_samples);
  const int n = solution.grid.steps;
  os.precision(17);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (int k = 0; k <= n; ++k) {
      os << j << ',' << k << ',' << solution.grid.time(k) << ',' << solution.x.values(j, k) << ','
         << solution.y(j, k) << ',';
      if (k < n) os << solution.z(j, k);
      os << '\n';
    }
  }
}

}  // namespace sigbsde
