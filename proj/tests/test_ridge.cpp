#include <doctest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "sigbsde/errors.hpp"
#include "sigbsde/ridge.hpp"

using namespace sigbsde;

namespace {

RowMatrix with_intercept(const Eigen::MatrixXd& x) {
  RowMatrix a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  return a;
}

RowMatrix random_design(Eigen::Index m, Eigen::Index f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(m, f);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng);
  return with_intercept(x);
}

double normal_equation_residual(const RowMatrix& a, const Eigen::VectorXd& y,
                                const RidgeModel& model) {
  const Eigen::MatrixXd lhs = a.transpose() * a + model.lambda * ridge_penalty(a.cols());
  const Eigen::VectorXd rhs = a.transpose() * y;
  return (lhs * model.weights - rhs).norm() / rhs.norm();
}

}  // namespace

TEST_SUITE("ridge") {

TEST_CASE("intercept-only regression returns the mean") {
  RowMatrix a = RowMatrix::Ones(5, 1);
  Eigen::VectorXd y(5);
  y << 1.0, 4.0, -2.0, 0.5, 3.0;
  for (double lambda : {0.0, 0.3, 100.0}) {
    const auto model = fit(a, y, lambda);
    CHECK(model.weights(0) == doctest::Approx(y.mean()));
  }
}

TEST_CASE("two-point interpolation and prediction") {
  RowMatrix a(2, 2);
  a << 1.0, 0.0, 1.0, 1.0;
  Eigen::VectorXd y(2);
  y << 0.0, 1.0;
  const auto model = fit(a, y, 0.0);
  CHECK_FALSE(model.fallback);
  CHECK(model.weights(0) == doctest::Approx(0.0).scale(1.0));
  CHECK(model.weights(1) == doctest::Approx(1.0));

  RowMatrix mid(1, 2);
  mid << 1.0, 0.5;
  CHECK(predict(model, mid)(0) == doctest::Approx(0.5));
}

TEST_CASE("penalized two-point fit matches Cramer's rule") {
  RowMatrix a(2, 2);
  a << 1.0, 0.0, 1.0, 1.0;
  Eigen::VectorXd y(2);
  y << 0.0, 1.0;
  const double lambda = 0.3;
  // (A^T A + lambda P) = [[2, 1], [1, 1 + lambda]], A^T y = (1, 1).
  const double g00 = 2.0, g01 = 1.0, g11 = 1.0 + lambda, r0 = 1.0, r1 = 1.0;
  const double det = g00 * g11 - g01 * g01;
  const auto model = fit(a, y, lambda);
  CHECK(model.weights(0) == doctest::Approx((g11 * r0 - g01 * r1) / det).epsilon(1e-14));
  CHECK(model.weights(1) == doctest::Approx((g00 * r1 - g01 * r0) / det).epsilon(1e-14));
}

TEST_CASE("predict basics and shape errors") {
  const RowMatrix a = random_design(6, 3, 2);
  RidgeModel zero{Eigen::VectorXd::Zero(4), 0.0, false};
  CHECK(predict(zero, a).isZero());
  RidgeModel constant{Eigen::VectorXd::Unit(4, 0) * 2.5, 0.0, false};
  CHECK(predict(constant, a).isApprox(Eigen::VectorXd::Constant(6, 2.5)));
  RidgeModel wrong{Eigen::VectorXd::Zero(3), 0.0, false};
  CHECK_THROWS_AS(predict(wrong, a), ShapeError);
  CHECK_THROWS_AS(fit(a, Eigen::VectorXd::Zero(5), 0.3), ShapeError);
  CHECK_THROWS_AS(fit(a, Eigen::VectorXd::Zero(6), -1.0), PreconditionError);
}

TEST_CASE("square full-rank system interpolates exactly") {
  const RowMatrix a = random_design(5, 4, 9);
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(5, -1.0, 2.0);
  const auto model = fit(a, y, 0.0);
  CHECK((predict(model, a) - y).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("normal equations hold to 1e-8 relative") {
  const RowMatrix a = random_design(400, 14, 3);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  Eigen::VectorXd y(400);
  for (auto& v : y) v = normal(rng);
  for (double lambda : {0.0, 0.3, 50.0}) {
    const auto model = fit(a, y, lambda);
    CHECK(normal_equation_residual(a, y, model) <= 1e-8);
  }
}

TEST_CASE("large penalties shrink towards the mean monotonically") {
  const RowMatrix a = random_design(200, 5, 5);
  Eigen::VectorXd y = a.rightCols(5) * Eigen::VectorXd::LinSpaced(5, 1.0, 3.0);
  y.array() += 0.7;
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : {1e2, 1e4, 1e6}) {
    const auto model = fit(a, y, lambda);
    const double slope = model.weights.tail(5).norm();
    CHECK(slope < previous);
    previous = slope;
  }
  const auto heavy = fit(a, y, 1e6);
  CHECK(heavy.weights.tail(5).norm() < 1e-3);
  CHECK((predict(heavy, a).array() - y.mean()).abs().maxCoeff() < 1e-2);
}

TEST_CASE("fit does not depend on sample order") {
  const RowMatrix a = random_design(50, 4, 6);
  const Eigen::VectorXd y = a * Eigen::VectorXd::LinSpaced(5, -1.0, 1.0) +
                            Eigen::VectorXd::LinSpaced(50, 0.0, 0.1);
  std::vector<int> order(50);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(8));
  RowMatrix pa(50, 5);
  Eigen::VectorXd py(50);
  for (int i = 0; i < 50; ++i) {
    pa.row(i) = a.row(order[static_cast<std::size_t>(i)]);
    py(i) = y(order[static_cast<std::size_t>(i)]);
  }
  CHECK(fit(a, y, 0.3).weights.isApprox(fit(pa, py, 0.3).weights, 1e-12));
}

TEST_CASE("rank-deficient unpenalized systems fall back to the minimal penalty") {
  RowMatrix a(4, 3);
  a << 1.0, 1.0, 2.0,
       1.0, 2.0, 4.0,
       1.0, 3.0, 6.0,
       1.0, 4.0, 8.0;
  Eigen::VectorXd y(4);
  y << 1.0, 2.0, 3.0, 4.0;
  RidgeSystem system(a, 0.0);
  CHECK(system.used_fallback());
  CHECK(system.effective_lambda() == kFallbackLambda);
  const auto model = system.fit(a, y);
  CHECK(model.fallback);
  CHECK(model.weights.allFinite());
  CHECK((predict(model, a) - y).cwiseAbs().maxCoeff() < 1e-6);

  CHECK_FALSE(RidgeSystem(a, 0.3).used_fallback());
}

}  // TEST_SUITE
