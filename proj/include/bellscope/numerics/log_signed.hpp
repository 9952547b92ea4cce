#pragma once

#include <cmath>
#include <limits>

namespace bellscope::numerics {

/// Real number stored as sign * exp(log_magnitude). Products of huge and tiny
/// factors (factorials, powers of two, reciprocal Gamma values) stay finite
/// until the final conversion.
struct LogSignedReal {
  double log_magnitude = -std::numeric_limits<double>::infinity();
  int sign = 0;

  static LogSignedReal zero() { return {}; }

  static LogSignedReal from_log(double log_magnitude, int sign) {
    if (sign == 0) return zero();
    return {log_magnitude, sign > 0 ? 1 : -1};
  }

  static LogSignedReal from_double(double x) {
    if (x == 0.0) return zero();
    return {std::log(std::abs(x)), x > 0.0 ? 1 : -1};
  }

  bool is_zero() const { return sign == 0; }

  double to_double() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_magnitude);
  }

  LogSignedReal pow(int n) const {
    if (n == 0) return {0.0, 1};
    if (sign == 0) return zero();
    int s = (sign < 0 && (n % 2 != 0)) ? -1 : 1;
    return {log_magnitude * n, s};
  }

  /// Real power of the magnitude; only defined for non-negative values.
  LogSignedReal pow_real(double exponent) const {
    if (sign == 0) return zero();
    return {log_magnitude * exponent, 1};
  }
};

inline LogSignedReal operator*(const LogSignedReal& a, const LogSignedReal& b) {
  if (a.sign == 0 || b.sign == 0) return LogSignedReal::zero();
  return {a.log_magnitude + b.log_magnitude, a.sign * b.sign};
}

inline LogSignedReal operator/(const LogSignedReal& a, const LogSignedReal& b) {
  if (a.sign == 0) return LogSignedReal::zero();
  return {a.log_magnitude - b.log_magnitude, a.sign * b.sign};
}

inline LogSignedReal operator-(const LogSignedReal& a) {
  return {a.log_magnitude, -a.sign};
}

/// Exact when at most one operand is nonzero, which is the only case the
/// half-line Hermite formulas need; otherwise falls back to a stable
/// log-sum-exp.
inline LogSignedReal operator+(const LogSignedReal& a, const LogSignedReal& b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  const LogSignedReal& big = a.log_magnitude >= b.log_magnitude ? a : b;
  const LogSignedReal& small = a.log_magnitude >= b.log_magnitude ? b : a;
  double ratio = std::exp(small.log_magnitude - big.log_magnitude);
  double scaled = 1.0 + big.sign * small.sign * ratio;
  if (scaled == 0.0) return LogSignedReal::zero();
  return {big.log_magnitude + std::log(std::abs(scaled)), scaled > 0.0 ? big.sign : -big.sign};
}

inline LogSignedReal operator-(const LogSignedReal& a, const LogSignedReal& b) {
  return a + (-b);
}

}  // namespace bellscope::numerics
