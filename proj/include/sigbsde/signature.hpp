#pragma once

// Signatures of time-augmented, piecewise-linear discrete paths.

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "sigbsde/simulate.hpp"
#include "sigbsde/tensor.hpp"

namespace sigbsde {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A discrete path in R^dim; coordinate 0 is time and strictly increasing.
struct AugmentedPath {
  int dim = 2;
  std::vector<double> points;  // (N + 1) x dim, row-major

  std::size_t size() const noexcept { return points.size() / static_cast<std::size_t>(dim); }
  std::span<const double> point(std::size_t k) const {
    return std::span<const double>(points).subspan(k * dim, dim);
  }
};

/// Lifts scalar paths to (t_k, B_{t_k}). time_scale multiplies the time coordinate.
std::vector<AugmentedPath> augment_time(const PathBatch& paths, double time_scale = 1.0);

/// Signature of the straight segment from p to q.
TruncatedTensor segment_signature(std::span<const double> p, std::span<const double> q, int depth);

/// In place: sig <- sig (x) exp(increment). sig holds dimension(d, depth)
/// coefficients in canonical order and d = increment.size().
void multiply_by_segment(std::span<double> sig, std::span<const double> increment, int depth);

/// Signatures over [t_0, t_k] for every grid index k of one path.
class PrefixSignatures {
 public:
  explicit PrefixSignatures(std::vector<TruncatedTensor> entries) : entries_(std::move(entries)) {}
  std::size_t size() const noexcept { return entries_.size(); }
  const TruncatedTensor& at(std::size_t k) const { return entries_.at(k); }
  int alphabet_size() const { return entries_.front().alphabet_size(); }
  int depth() const { return entries_.front().depth(); }

 private:
  std::vector<TruncatedTensor> entries_;
};

PrefixSignatures prefix_signatures(const AugmentedPath& path, int depth);

/// Flattened coefficients in canonical word order; entry 0 is the empty word.
Eigen::VectorXd feature_vector(const TruncatedTensor& sig);

/// Prefix-signature features of a whole Brownian batch, time-augmented and
/// cached for every grid index. at(k) is the samples x feature_count matrix
/// whose row j is feature_vector(Sig(B^j on [0, t_k])).
class SignatureFeatures {
 public:
  SignatureFeatures(const PathBatch& brownian, int depth, bool normalize_time = false);

  Eigen::Map<const RowMatrix> at(int k) const;
  Eigen::Index samples() const noexcept { return samples_; }
  int steps() const noexcept { return steps_; }
  int depth() const noexcept { return depth_; }
  Eigen::Index feature_count() const noexcept { return features_; }

 private:
  Eigen::Index samples_;
  int steps_;
  int depth_;
  Eigen::Index features_;
  std::unique_ptr<double[]> data_;  // (steps + 1) x samples x features
};

}  // namespace sigbsde
