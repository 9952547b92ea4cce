#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bellscope/numerics/eigen.hpp"
#include "bellscope/numerics/log_signed.hpp"
#include "bellscope/numerics/quadrature.hpp"
#include "bellscope/numerics/special.hpp"

using namespace bellscope;
using namespace bellscope::numerics;

TEST(Quadrature, PolynomialIsExact) {
  EXPECT_NEAR(integrate_1d([](double x) { return x * x * x - 2 * x; }, -1.0, 3.0), 12.0, 1e-13);
}

TEST(Quadrature, GaussianOverWholeLine) {
  const double v = integrate_1d([](double x) { return std::exp(-x * x); }, -kInfinity, kInfinity);
  EXPECT_NEAR(v, std::sqrt(std::numbers::pi), 1e-10);
}

TEST(Quadrature, HalfLines) {
  EXPECT_NEAR(integrate_1d([](double x) { return std::exp(-x); }, 0.0, kInfinity), 1.0, 1e-10);
  EXPECT_NEAR(integrate_1d([](double x) { return std::exp(2 * x); }, -kInfinity, 0.0), 0.5, 1e-10);
}

TEST(Quadrature, ReversedLimitsFlipSign) {
  EXPECT_NEAR(integrate_1d([](double x) { return std::cos(x); }, std::numbers::pi / 2, 0.0), -1.0, 1e-12);
}

TEST(Quadrature, OscillatoryAgainstClosedForm) {
  // int_0^inf e^{-x^2} cos(5x) dx = sqrt(pi)/2 e^{-25/4}
  const double v = integrate_1d([](double x) { return std::exp(-x * x) * std::cos(5 * x); }, 0.0, kInfinity, 1e-12);
  EXPECT_NEAR(v, 0.5 * std::sqrt(std::numbers::pi) * std::exp(-6.25), 1e-11);
}

TEST(Quadrature, ReportsFailureWhenBudgetRunsOut) {
  auto rough = [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); };
  EXPECT_THROW(integrate_1d(rough, 0.0, 1.0, 1e-14, 5), NumericalError);
}

TEST(Special, ReciprocalGammaPolesAndValues) {
  EXPECT_EQ(reciprocal_gamma(0.0), 0.0);
  EXPECT_EQ(reciprocal_gamma(-3.0), 0.0);
  EXPECT_NEAR(reciprocal_gamma(0.5), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
  // Gamma(-1/2) = -2 sqrt(pi)
  EXPECT_NEAR(reciprocal_gamma(-0.5), -1.0 / (2 * std::sqrt(std::numbers::pi)), 1e-15);
  EXPECT_NEAR(reciprocal_gamma(5.0), 1.0 / 24.0, 1e-16);
}

TEST(Special, LogReciprocalGammaMatchesDirect) {
  for (double z : {-7.5, -2.5, -0.25, 0.75, 3.5, 12.0}) {
    const auto lg = log_reciprocal_gamma(z);
    EXPECT_NEAR(lg.to_double(), 1.0 / std::tgamma(z), 1e-12 * std::abs(1.0 / std::tgamma(z))) << z;
  }
  const auto huge = log_reciprocal_gamma(400.5);
  EXPECT_EQ(huge.sign, 1);
  EXPECT_NEAR(huge.log_magnitude, -std::lgamma(400.5), 1e-9);
}

TEST(Special, HermiteRecurrenceMatchesExplicit) {
  const double x = 0.7;
  EXPECT_NEAR(hermite_eval(0, x), 1.0, 1e-15);
  EXPECT_NEAR(hermite_eval(3, x), 8 * x * x * x - 12 * x, 1e-13);
  EXPECT_NEAR(hermite_eval(4, x), 16 * std::pow(x, 4) - 48 * x * x + 12, 1e-12);
}

TEST(Special, HermiteFunctionsAreOrthonormal) {
  for (int r = 0; r <= 12; ++r) {
    for (int s = 0; s <= r; ++s) {
      const double v =
          integrate_1d([&](double x) { return hermite_function(r, x) * hermite_function(s, x); }, -kInfinity, kInfinity);
      EXPECT_NEAR(v, r == s ? 1.0 : 0.0, 1e-9) << r << "," << s;
    }
  }
}

TEST(LogSigned, ArithmeticRoundTrips) {
  const auto a = LogSignedReal::from_double(-3.0);
  const auto b = LogSignedReal::from_double(5.0);
  EXPECT_NEAR((a * b).to_double(), -15.0, 1e-12);
  EXPECT_NEAR((a / b).to_double(), -0.6, 1e-14);
  EXPECT_NEAR((a + b).to_double(), 2.0, 1e-13);
  EXPECT_NEAR((a - b).to_double(), -8.0, 1e-13);
  EXPECT_NEAR(a.pow(3).to_double(), -27.0, 1e-11);
  EXPECT_TRUE((b - b).is_zero());
  EXPECT_TRUE((a * LogSignedReal::zero()).is_zero());
}

TEST(Eigen, UnconstrainedTopPair) {
  const SymmetricMatrix m{{2.0, 1.0}, {1.0, 2.0}};
  const auto pair = max_eigenpair(m);
  EXPECT_NEAR(pair.value, 3.0, 1e-12);
  EXPECT_NEAR(std::abs(pair.vector[0]), std::sqrt(0.5), 1e-12);
  EXPECT_NEAR(std::abs(pair.vector[1]), std::sqrt(0.5), 1e-12);
}

TEST(Eigen, NonnegativeConstraintBindsOnIndefiniteCoupling) {
  // Top eigenvector (1,-1)/sqrt2 has mixed signs; over the nonnegative
  // orthant the best Rayleigh quotient is the diagonal entry 1.
  const SymmetricMatrix m{{1.0, -2.0}, {-2.0, 1.0}};
  EXPECT_NEAR(max_eigenpair(m).value, 3.0, 1e-12);
  const auto constrained = max_eigenpair(m, EigenConstraint::nonnegative);
  EXPECT_NEAR(constrained.value, 1.0, 1e-9);
  for (double v : constrained.vector) EXPECT_GE(v, 0.0);
}

TEST(Eigen, NonnegativeMatchesUnconstrainedForPositiveMatrix) {
  const SymmetricMatrix m{{1.0, 0.5, 0.2}, {0.5, 2.0, 0.3}, {0.2, 0.3, 1.5}};
  EXPECT_NEAR(max_eigenpair(m, EigenConstraint::nonnegative).value, max_eigenpair(m).value, 1e-9);
}

TEST(Eigen, RejectsAsymmetricInput) {
  EXPECT_THROW((SymmetricMatrix{{1.0, 2.0}, {0.0, 1.0}}), std::invalid_argument);
}
