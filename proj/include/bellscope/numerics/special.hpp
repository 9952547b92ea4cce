#pragma once

#include <cmath>
#include <numbers>

#include "bellscope/numerics/log_signed.hpp"

namespace bellscope::numerics {

inline bool is_nonpositive_integer(double z) {
  return z <= 0.0 && z == std::floor(z);
}

/// 1/Gamma(z) in log-signed form; exactly zero at the poles of Gamma.
inline LogSignedReal log_reciprocal_gamma(double z) {
  if (is_nonpositive_integer(z)) return LogSignedReal::zero();
  int sign = 1;
  if (z < 0.0) {
    // Gamma alternates sign between consecutive negative integers.
    auto k = static_cast<long long>(std::ceil(-z));
    sign = (k % 2 == 0) ? 1 : -1;
  }
  return LogSignedReal::from_log(-std::lgamma(z), sign);
}

inline double reciprocal_gamma(double z) {
  if (is_nonpositive_integer(z)) return 0.0;
  if (std::abs(z) < 170.0) {
    double g = std::tgamma(z);
    if (std::isfinite(g) && g != 0.0) return 1.0 / g;
  }
  return log_reciprocal_gamma(z).to_double();
}

inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

/// Physicists' Hermite polynomial H_n(x) by three-term recurrence.
inline double hermite_eval(int n, double x) {
  if (n <= 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Normalized oscillator eigenfunction <x|n> = H_n(x) e^{-x^2/2} / (pi^{1/4} sqrt(2^n n!)).
/// Uses the normalized recurrence so large n does not overflow.
inline double hermite_function(int n, double x) {
  const double psi0 = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(std::numbers::pi));
  if (n == 0) return psi0;
  double prev = psi0;
  double cur = std::sqrt(2.0) * x * psi0;
  for (int k = 1; k < n; ++k) {
    double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace bellscope::numerics
