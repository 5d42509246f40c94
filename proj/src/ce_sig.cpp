#include "sigbsde/ce_sig.hpp"

#include <cmath>
#include <string>

#include "sigbsde/errors.hpp"

namespace sigbsde {

void CeConfig::validate() const {
  if (depth < 1) throw PreconditionError("CeConfig: depth must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw PreconditionError("CeConfig: lambda must be finite and nonnegative");
  }
}

ConditionalExpectation::ConditionalExpectation(const SignatureFeatures& features, int k,
                                               double lambda)
    : features_(&features), k_(k) {
  if (k < 0 || k > features.steps()) {
    throw PreconditionError("conditional expectation: grid index " + std::to_string(k) +
                            " outside [0, " + std::to_string(features.steps()) + "]");
  }
  if (k > 0) system_.emplace(features.at(k), lambda);
}

std::optional<RidgeModel> ConditionalExpectation::model(
    Eigen::Ref<const Eigen::VectorXd> targets) const {
  if (!system_) return std::nullopt;
  return system_->fit(features_->at(k_), targets);
}

Eigen::VectorXd ConditionalExpectation::operator()(
    Eigen::Ref<const Eigen::VectorXd> targets) const {
  if (targets.size() != features_->samples()) {
    throw ShapeError("conditional expectation: target count does not match sample count");
  }
  if (!system_) {
    return Eigen::VectorXd::Constant(targets.size(), targets.mean());
  }
  const auto x = features_->at(k_);
  return predict(system_->fit(x, targets), x);
}

Eigen::VectorXd conditional_expectation(Eigen::Ref<const Eigen::VectorXd> targets,
                                        const SignatureFeatures& features, int k,
                                        const CeConfig& cfg) {
  cfg.validate();
  if (cfg.depth != features.depth()) {
    throw ShapeError("conditional expectation: config depth " + std::to_string(cfg.depth) +
                     " but features built at depth " + std::to_string(features.depth()));
  }
  return ConditionalExpectation(features, k, cfg.lambda)(targets);
}

}  // namespace sigbsde
