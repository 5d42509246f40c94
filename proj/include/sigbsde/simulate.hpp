#pragma once

// Seeded Brownian sampling and forward Euler-Maruyama schemes.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>

namespace sigbsde {

/// Column-major samples x times; column k holds every sample at grid index k.
using PathMatrix = Eigen::MatrixXd;

/// Equidistant grid 0 = t_0 < ... < t_N = horizon.
struct TimeGrid {
  double horizon = 1.0;
  int steps = 500;

  double dt() const noexcept { return horizon / steps; }
  double time(int k) const noexcept { return k == steps ? horizon : k * dt(); }
  void validate() const;
};

/// SplitMix64: a 64-bit generator whose state can be derived from any key,
/// which gives independent reproducible substreams per sample.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

 private:
  std::uint64_t state_;
};

/// Deterministic 64-bit mix of (seed, stream) used to derive substream seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

struct PathBatch {
  TimeGrid grid;
  PathMatrix values;      // samples x (steps + 1)
  PathMatrix increments;  // samples x steps, shared Brownian increments
  std::uint64_t seed = 0;

  Eigen::Index samples() const noexcept { return values.rows(); }
  int steps() const noexcept { return grid.steps; }
};

/// M Brownian paths started at 0 with N(0, dt) increments.
PathBatch sample_brownian(Eigen::Index samples, const TimeGrid& grid, std::uint64_t seed);

using CoefficientRule = std::function<double(double t, double x)>;

/// X_{k+1} = X_k + b(t_k, X_k) dt + sigma(t_k, X_k) dB_{k+1} on the driving increments.
PathBatch euler_maruyama(const CoefficientRule& drift, const CoefficientRule& diffusion, double x0,
                         const PathBatch& driving);

/// Full-truncation Euler scheme for d beta = a (b - beta) dt + sigma sqrt(beta) dB.
PathBatch cir_full_truncation(double speed, double level, double sigma, double x0,
                              const PathBatch& driving);

/// CSV dump with header `sample,k,t,value`; at most max_samples samples.
void write_paths_csv(std::ostream& os, const PathBatch& batch,
                     Eigen::Index max_samples = std::numeric_limits<Eigen::Index>::max());

}  // namespace sigbsde
