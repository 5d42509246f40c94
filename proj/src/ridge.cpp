#include "sigbsde/ridge.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sigbsde/errors.hpp"

namespace sigbsde {
namespace {

// A pivot this small relative to its Gram diagonal means the column is
// numerically in the span of the previous ones.
constexpr double kRankTolerance = 1e-12;

bool factor_is_singular(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::MatrixXd& gram) {
  if (llt.info() != Eigen::Success) return true;
  const Eigen::MatrixXd& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    const double pivot = l(i, i) * l(i, i);
    if (!(gram(i, i) > 0.0) || !(pivot > kRankTolerance * gram(i, i))) return true;
  }
  return false;
}

}  // namespace

Eigen::MatrixXd ridge_penalty(Eigen::Index features) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(features, features);
  if (features > 0) p(0, 0) = 0.0;
  return p;
}

RidgeSystem::RidgeSystem(Eigen::Ref<const RowMatrix> features, double lambda)
    : lambda_(lambda), effective_lambda_(lambda) {
  const Eigen::Index m = features.rows();
  const Eigen::Index f = features.cols();
  if (m < 1 || f < 1) throw PreconditionError("ridge: need at least one sample and one feature");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw PreconditionError("ridge: lambda must be finite and nonnegative");
  }
  if (!features.allFinite()) throw PreconditionError("ridge: non-finite feature entries");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(f, f);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose());
  gram.diagonal().tail(f - 1).array() += lambda;
  llt_.compute(gram);
  if (lambda == 0.0 && factor_is_singular(llt_, gram)) {
    effective_lambda_ = kFallbackLambda;
    fallback_ = true;
    gram.diagonal().tail(f - 1).array() += kFallbackLambda;
    ldlt_.compute(gram);
    if (ldlt_.info() != Eigen::Success) {
      throw std::runtime_error("ridge: LDLT factorization failed");
    }
    return;
  }
  if (llt_.info() != Eigen::Success) {
    throw std::runtime_error("ridge: Cholesky factorization failed");
  }
}

RidgeModel RidgeSystem::fit(Eigen::Ref<const RowMatrix> features,
                            Eigen::Ref<const Eigen::VectorXd> targets) const {
  if (features.cols() != (fallback_ ? ldlt_.rows() : llt_.rows())) throw ShapeError("ridge: feature count mismatch");
  if (features.rows() != targets.size()) {
    throw ShapeError("ridge: " + std::to_string(features.rows()) + " samples but " +
                     std::to_string(targets.size()) + " targets");
  }
  if (!targets.allFinite()) throw PreconditionError("ridge: non-finite targets");
  const Eigen::VectorXd rhs = features.transpose() * targets;
  if (fallback_) return RidgeModel{ldlt_.solve(rhs), effective_lambda_, true};
  return RidgeModel{llt_.solve(rhs), lambda_, false};
}

RidgeModel fit(Eigen::Ref<const RowMatrix> features, Eigen::Ref<const Eigen::VectorXd> targets,
               double lambda) {
  return RidgeSystem(features, lambda).fit(features, targets);
}

Eigen::VectorXd predict(const RidgeModel& model, Eigen::Ref<const RowMatrix> features) {
  if (features.cols() != model.weights.size()) {
    throw ShapeError("predict: model has " + std::to_string(model.weights.size()) +
                     " weights but features have " + std::to_string(features.cols()) +
                     " columns");
  }
  return features * model.weights;
}

}  // namespace sigbsde
