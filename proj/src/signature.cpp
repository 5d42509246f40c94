#include "sigbsde/signature.hpp"

#include <algorithm>
#include <cmath>

#include "sigbsde/errors.hpp"

namespace sigbsde {
namespace {

// Horner form of the truncated product with exp(v), level n from the top:
//   S'_n = (((S_0 v / n + S_1) v / (n-1) + S_2) ... ) v / 1 + S_n
// Levels are rewritten from the highest down so lower levels are still the
// old values when they are read.
void multiply_by_segment_impl(double* sig, const double* v, int d, int depth,
                              std::vector<double>& acc, std::vector<double>& next) {
  for (int n = depth; n >= 1; --n) {
    acc.assign(1, sig[0]);
    std::size_t width = 1;
    std::size_t offset = 0;
    for (int i = 1; i <= n; ++i) {
      offset += width;
      const double scale = 1.0 / (n - i + 1);
      next.resize(width * d);
      for (std::size_t u = 0; u < width; ++u) {
        const double a = acc[u] * scale;
        double* row = next.data() + u * d;
        const double* s = sig + offset + u * d;
        for (int c = 0; c < d; ++c) row[c] = a * v[c] + s[c];
      }
      width *= d;
      acc.swap(next);
    }
    std::copy(acc.begin(), acc.end(), sig + offset);
  }
}

}  // namespace

std::vector<AugmentedPath> augment_time(const PathBatch& paths, double time_scale) {
  if (paths.samples() < 1 || paths.values.cols() < 1) {
    throw PreconditionError("augment_time: empty path batch");
  }
  std::vector<AugmentedPath> out(static_cast<std::size_t>(paths.samples()));
  const int n = paths.steps();
  for (Eigen::Index j = 0; j < paths.samples(); ++j) {
    auto& p = out[static_cast<std::size_t>(j)];
    p.dim = 2;
    p.points.resize(2 * static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k) {
      p.points[2 * k] = paths.grid.time(k) * time_scale;
      p.points[2 * k + 1] = paths.values(j, k);
    }
  }
  return out;
}

TruncatedTensor segment_signature(std::span<const double> p, std::span<const double> q,
                                  int depth) {
  if (p.size() != q.size()) throw ShapeError("segment_signature: endpoint dimensions differ");
  std::vector<double> v(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) v[i] = q[i] - p[i];
  return exp_level1(v, depth);
}

void multiply_by_segment(std::span<double> sig, std::span<const double> increment, int depth) {
  const int d = static_cast<int>(increment.size());
  if (sig.size() != dimension(d, depth)) {
    throw ShapeError("multiply_by_segment: coefficient count does not match (d, depth)");
  }
  std::vector<double> acc, next;
  multiply_by_segment_impl(sig.data(), increment.data(), d, depth, acc, next);
}

PrefixSignatures prefix_signatures(const AugmentedPath& path, int depth) {
  if (path.size() < 2) throw PreconditionError("prefix_signatures: need at least one segment");
  if (depth < 1) throw PreconditionError("prefix_signatures: depth must be >= 1");
  const int d = path.dim;
  std::vector<TruncatedTensor> entries;
  entries.reserve(path.size());
  entries.push_back(TruncatedTensor::unit(d, depth));
  std::vector<double> inc(d), acc, next;
  for (std::size_t k = 1; k < path.size(); ++k) {
    auto p = path.point(k - 1);
    auto q = path.point(k);
    for (int c = 0; c < d; ++c) inc[c] = q[c] - p[c];
    TruncatedTensor s = entries.back();
    multiply_by_segment_impl(s.coeffs().data(), inc.data(), d, depth, acc, next);
    entries.push_back(std::move(s));
  }
  return PrefixSignatures(std::move(entries));
}

Eigen::VectorXd feature_vector(const TruncatedTensor& sig) {
  auto c = sig.coeffs();
  return Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
}

SignatureFeatures::SignatureFeatures(const PathBatch& brownian, int depth, bool normalize_time)
    : samples_(brownian.samples()),
      steps_(brownian.steps()),
      depth_(depth),
      features_(static_cast<Eigen::Index>(dimension(2, depth))) {
  if (depth < 1) throw PreconditionError("SignatureFeatures: depth must be >= 1");
  if (samples_ < 1) throw PreconditionError("SignatureFeatures: empty batch");
  const std::size_t f = static_cast<std::size_t>(features_);
  const std::size_t per_step = static_cast<std::size_t>(samples_) * f;
  data_ = std::make_unique_for_overwrite<double[]>(per_step * static_cast<std::size_t>(steps_ + 1));
  const TimeGrid& grid = brownian.grid;
  const double time_scale = normalize_time ? 1.0 / grid.horizon : 1.0;

  // Step-major sweep: slice k + 1 starts as a copy of slice k and is then
  // extended by one segment, so every pass reads and writes contiguously.
  double* first = data_.get();
  std::fill(first, first + per_step, 0.0);
  for (Eigen::Index j = 0; j < samples_; ++j) first[static_cast<std::size_t>(j) * f] = 1.0;
  for (int k = 0; k < steps_; ++k) {
    const double dt = (grid.time(k + 1) - grid.time(k)) * time_scale;
    const double* prev = data_.get() + static_cast<std::size_t>(k) * per_step;
    double* cur = data_.get() + static_cast<std::size_t>(k + 1) * per_step;
#pragma omp parallel
    {
      std::vector<double> acc, next;
#pragma omp for schedule(static)
      for (Eigen::Index j = 0; j < samples_; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * f;
        std::copy(prev + row, prev + row + f, cur + row);
        const double inc[2] = {dt, brownian.values(j, k + 1) - brownian.values(j, k)};
        multiply_by_segment_impl(cur + row, inc, 2, depth_, acc, next);
      }
    }
  }
}

Eigen::Map<const RowMatrix> SignatureFeatures::at(int k) const {
  if (k < 0 || k > steps_) throw PreconditionError("SignatureFeatures: grid index out of range");
  const std::size_t per_step = static_cast<std::size_t>(samples_ * features_);
  return Eigen::Map<const RowMatrix>(data_.get() + static_cast<std::size_t>(k) * per_step,
                                     samples_, features_);
}

}  // namespace sigbsde
