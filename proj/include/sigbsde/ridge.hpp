#pragma once

// Ridge regression with an unpenalized intercept column.
//
// Column 0 of the feature matrix is the constant feature. The weights solve
//   (A^T A + lambda P) w = A^T y,   P = I with P(0, 0) = 0,
// through a Cholesky factorization of the regularized Gram matrix. A fallback
// system is nearly singular by construction and uses the pivoted LDL^T form.

#include <Eigen/Dense>

#include "sigbsde/signature.hpp"

namespace sigbsde {

inline constexpr double kFallbackLambda = 1e-10;

struct RidgeModel {
  Eigen::VectorXd weights;
  double lambda = 0.0;
  /// True when lambda = 0 gave a singular system and kFallbackLambda was used.
  bool fallback = false;
};

/// Factorizes the regularized Gram matrix once so that several targets can be
/// fitted against the same features.
class RidgeSystem {
 public:
  RidgeSystem(Eigen::Ref<const RowMatrix> features, double lambda);

  /// features must be the matrix the system was built from.
  RidgeModel fit(Eigen::Ref<const RowMatrix> features,
                 Eigen::Ref<const Eigen::VectorXd> targets) const;

  bool used_fallback() const noexcept { return fallback_; }
  double effective_lambda() const noexcept { return effective_lambda_; }

 private:
  double lambda_;
  double effective_lambda_;
  bool fallback_ = false;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;  // used only after a fallback
};

RidgeModel fit(Eigen::Ref<const RowMatrix> features, Eigen::Ref<const Eigen::VectorXd> targets,
               double lambda);

Eigen::VectorXd predict(const RidgeModel& model, Eigen::Ref<const RowMatrix> features);

/// Penalty matrix P of the normal equations for f features.
Eigen::MatrixXd ridge_penalty(Eigen::Index features);

}  // namespace sigbsde
