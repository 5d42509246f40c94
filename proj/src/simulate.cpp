#include "sigbsde/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sigbsde/errors.hpp"

namespace sigbsde {

void TimeGrid::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw PreconditionError("TimeGrid: horizon must be positive and finite");
  }
  if (steps < 1) throw PreconditionError("TimeGrid: need at least one step");
}

SplitMix64::result_type SplitMix64::operator()() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  SplitMix64 outer(seed);
  SplitMix64 inner(outer() ^ (stream * 0xD1B54A32D192ED03ULL));
  return inner();
}

PathBatch sample_brownian(Eigen::Index samples, const TimeGrid& grid, std::uint64_t seed) {
  grid.validate();
  if (samples < 1) throw PreconditionError("sample_brownian: need at least one sample");
  const int n = grid.steps;
  const double sd = std::sqrt(grid.dt());

  PathBatch batch{grid, PathMatrix(samples, n + 1), PathMatrix(samples, n), seed};
  batch.values.col(0).setZero();

#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < samples; ++j) {
    SplitMix64 rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
    std::normal_distribution<double> normal(0.0, sd);
    double b = 0.0;
    for (int k = 0; k < n; ++k) {
      const double db = normal(rng);
      batch.increments(j, k) = db;
      b += db;
      batch.values(j, k + 1) = b;
    }
  }
  return batch;
}

PathBatch euler_maruyama(const CoefficientRule& drift, const CoefficientRule& diffusion, double x0,
                         const PathBatch& driving) {
  const TimeGrid& grid = driving.grid;
  const int n = grid.steps;
  const double dt = grid.dt();
  PathBatch out{grid, PathMatrix(driving.samples(), n + 1), driving.increments, driving.seed};
  out.values.col(0).setConstant(x0);
  for (int k = 0; k < n; ++k) {
    const double t = grid.time(k);
    auto cur = out.values.col(k);
    auto next = out.values.col(k + 1);
    for (Eigen::Index j = 0; j < driving.samples(); ++j) {
      const double x = cur(j);
      const double x1 = x + drift(t, x) * dt + diffusion(t, x) * driving.increments(j, k);
      if (!std::isfinite(x1)) {
        throw SimulationError("euler_maruyama: non-finite state at step " + std::to_string(k + 1) +
                                  ", sample " + std::to_string(j),
                              k + 1);
      }
      next(j) = x1;
    }
  }
  return out;
}

PathBatch cir_full_truncation(double speed, double level, double sigma, double x0,
                              const PathBatch& driving) {
  if (!(speed > 0.0 && level > 0.0 && sigma >= 0.0 && x0 > 0.0)) {
    throw PreconditionError(
        "cir_full_truncation: a, b, x0 must be positive and sigma nonnegative");
  }
  return euler_maruyama(
      [=](double, double x) { return speed * (level - std::max(x, 0.0)); },
      [=](double, double x) { return sigma * std::sqrt(std::max(x, 0.0)); }, x0, driving);
}

void write_paths_csv(std::ostream& os, const PathBatch& batch, Eigen::Index max_samples) {
  os << "sample,k,t,value\n";
  const Eigen::Index m = std::min(batch.samples(), max_samples);
  os.precision(17);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (int k = 0; k <= batch.steps(); ++k) {
      os << j << ',' << k << ',' << batch.grid.time(k) << ',' << batch.values(j, k) << '\n';
    }
  }
}

}  // namespace sigbsde
