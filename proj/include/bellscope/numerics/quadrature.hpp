#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

#include "bellscope/error.hpp"

namespace bellscope::numerics {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultQuadratureTolerance = 1e-10;

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae on [0, 1]).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

template <typename F>
Panel kronrod_panel(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  if (!std::isfinite(kronrod)) {
    throw NumericalError("quadrature: integrand is not finite on the integration range");
  }
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

template <typename F>
QuadratureResult adaptive_finite(const F& f, double a, double b, double tol, int max_subdivisions) {
  std::priority_queue<Panel> panels;
  Panel first = kronrod_panel(f, a, b);
  double value = first.value;
  double error = first.error;
  panels.push(first);
  int subdivisions = 0;
  while (error > tol) {
    if (subdivisions >= max_subdivisions) {
      std::ostringstream msg;
      msg << "quadrature did not converge after " << subdivisions
          << " subdivisions; achieved error estimate " << error << " (requested " << tol << ")";
      throw NumericalError(msg.str());
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = kronrod_panel(f, worst.a, mid);
    Panel right = kronrod_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++subdivisions;
  }
  // Re-sum to shed the rounding drift of the running totals.
  value = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  return {value, error, subdivisions};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature with a global absolute error
/// target. Infinite endpoints are mapped onto a finite interval:
///   (-inf, inf): x = t / (1 - t^2),   t in (-1, 1)
///   (a, inf):    x = a + t / (1 - t), t in (0, 1)
///   (-inf, b):   x = b - (1 - t) / t, t in (0, 1)
/// Throws NumericalError with the achieved error estimate on non-convergence.
template <typename F>
QuadratureResult integrate_1d_detailed(const F& f, double a, double b,
                                       double tol = kDefaultQuadratureTolerance,
                                       int max_subdivisions = 4000) {
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  if (a == b) return {};
  if (a > b) {
    QuadratureResult r = integrate_1d_detailed(f, b, a, tol, max_subdivisions);
    r.value = -r.value;
    return r;
  }
  const bool lower_inf = std::isinf(a);
  const bool upper_inf = std::isinf(b);
  if (lower_inf && upper_inf) {
    auto g = [&f](double t) {
      const double d = 1.0 - t * t;
      const double fx = f(t / d);
      return fx == 0.0 ? 0.0 : fx * (1.0 + t * t) / (d * d);
    };
    return detail::adaptive_finite(g, -1.0, 1.0, tol, max_subdivisions);
  }
  if (upper_inf) {
    auto g = [&f, a](double t) {
      const double d = 1.0 - t;
      const double fx = f(a + t / d);
      return fx == 0.0 ? 0.0 : fx / (d * d);
    };
    return detail::adaptive_finite(g, 0.0, 1.0, tol, max_subdivisions);
  }
  if (lower_inf) {
    auto g = [&f, b](double t) {
      const double fx = f(b - (1.0 - t) / t);
      return fx == 0.0 ? 0.0 : fx / (t * t);
    };
    return detail::adaptive_finite(g, 0.0, 1.0, tol, max_subdivisions);
  }
  return detail::adaptive_finite(f, a, b, tol, max_subdivisions);
}

template <typename F>
double integrate_1d(const F& f, double a, double b, double tol = kDefaultQuadratureTolerance,
                    int max_subdivisions = 4000) {
  return integrate_1d_detailed(f, a, b, tol, max_subdivisions).value;
}

}  // namespace bellscope::numerics
