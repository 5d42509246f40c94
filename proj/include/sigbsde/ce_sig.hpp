#pragma once

// Conditional expectations E[xi | F_{t_k}] estimated by ridge regression of
// the targets on truncated signature features of the time-augmented
// Brownian path over [0, t_k].

#include <Eigen/Dense>
#include <optional>

#include "sigbsde/ridge.hpp"
#include "sigbsde/signature.hpp"

namespace sigbsde {

struct CeConfig {
  int depth = 3;
  double lambda = 0.3;
  /// Scale the time coordinate to [0, 1] before taking signatures.
  bool normalize_time = false;

  void validate() const;
};

/// Estimator for one grid index. The ridge system is factorized once and
/// reused for every target regressed at that index.
class ConditionalExpectation {
 public:
  ConditionalExpectation(const SignatureFeatures& features, int k, double lambda);

  Eigen::VectorXd operator()(Eigen::Ref<const Eigen::VectorXd> targets) const;

  /// Coefficients fitted for the given targets; empty at k = 0.
  std::optional<RidgeModel> model(Eigen::Ref<const Eigen::VectorXd> targets) const;

  bool used_fallback() const noexcept { return system_ && system_->used_fallback(); }

 private:
  const SignatureFeatures* features_;
  int k_;
  std::optional<RidgeSystem> system_;  // absent at k = 0, where F_0 is trivial
};

Eigen::VectorXd conditional_expectation(Eigen::Ref<const Eigen::VectorXd> targets,
                                        const SignatureFeatures& features, int k,
                                        const CeConfig& cfg);

}  // namespace sigbsde
