#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellscope/mk.hpp"
#include "bellscope/numerics/eigen.hpp"
#include "bellscope/numerics/log_signed.hpp"
#include "bellscope/numerics/special.hpp"

namespace bellscope {

/// Photon-number-correlated state sum_r c_r |r>^{(x)m} with real coefficients,
/// truncated to c_0..c_{d-1}.
class FockCorrelatedState {
 public:
  FockCorrelatedState(int modes, std::vector<double> coefficients)
      : m_(modes), c_(std::move(coefficients)) {
    if (m_ < 1) throw std::invalid_argument("FockCorrelatedState: mode count must be at least 1");
    if (c_.empty()) throw std::invalid_argument("FockCorrelatedState: truncation must be at least 1");
    double norm2 = 0.0;
    for (double c : c_) {
      if (!std::isfinite(c)) throw std::invalid_argument("FockCorrelatedState: non-finite coefficient");
      norm2 += c * c;
    }
    if (std::abs(norm2 - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg << "FockCorrelatedState: sum of squared coefficients is " << norm2 << ", expected 1";
      throw std::invalid_argument(msg.str());
    }
  }

  static FockCorrelatedState normalized(int modes, std::vector<double> coefficients) {
    double norm2 = 0.0;
    for (double c : coefficients) norm2 += c * c;
    if (!(norm2 > 0.0)) throw std::invalid_argument("FockCorrelatedState: zero coefficient vector");
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& c : coefficients) c *= scale;
    return {modes, std::move(coefficients)};
  }

  /// (|0...0> + |1...1>)/sqrt(2)
  static FockCorrelatedState ghz(int modes) {
    return {modes, {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0}};
  }

  int modes() const { return m_; }
  int truncation() const { return static_cast<int>(c_.size()); }
  const std::vector<double>& coefficients() const { return c_; }
  double coefficient(int r) const { return r < truncation() ? c_[static_cast<std::size_t>(r)] : 0.0; }

 private:
  int m_;
  std::vector<double> c_;
};

/// Quadrature angles (theta_t, theta'_t) for each party.
struct AngleSettings {
  std::vector<double> unprimed;
  std::vector<double> primed;

  AngleSettings(std::vector<double> theta, std::vector<double> theta_primed)
      : unprimed(std::move(theta)), primed(std::move(theta_primed)) {
    if (unprimed.size() != primed.size() || unprimed.empty()) {
      throw std::invalid_argument("AngleSettings: need one (theta, theta') pair per party");
    }
    for (std::size_t t = 0; t < unprimed.size(); ++t) {
      if (!std::isfinite(unprimed[t]) || !std::isfinite(primed[t])) {
        throw std::invalid_argument("AngleSettings: angles must be finite");
      }
    }
  }

  int parties() const { return static_cast<int>(unprimed.size()); }

  /// Sum of the chosen angles; the correlator of a photon-number-correlated
  /// state depends on the settings only through this sum.
  double phase_sum(const SettingTuple& tuple) const {
    if (tuple.size() != unprimed.size()) throw std::invalid_argument("AngleSettings: tuple length mismatch");
    double phi = 0.0;
    for (std::size_t t = 0; t < unprimed.size(); ++t) phi += tuple.primed(t) ? primed[t] : unprimed[t];
    return phi;
  }
};

/// Sign-binned outcome pattern d in {+1,-1}^m.
struct BinnedOutcome {
  std::vector<int> signs;

  int sigma() const {
    int s = 1;
    for (int d : signs) s *= d;
    return s;
  }

  /// Pattern number `index` of 2^m: bit t set means party t saw -1.
  static BinnedOutcome from_index(int modes, unsigned index) {
    BinnedOutcome out;
    for (int t = 0; t < modes; ++t) out.signs.push_back(((index >> t) & 1U) ? -1 : 1);
    return out;
  }
};

namespace sign_binning_detail {

using numerics::LogSignedReal;

// F(r, s) = 1 / (Gamma((1 - r)/2) Gamma(-s/2)); nonzero only for even r, odd s.
inline LogSignedReal f_function(int r, int s) {
  return numerics::log_reciprocal_gamma(0.5 * (1 - r)) * numerics::log_reciprocal_gamma(-0.5 * s);
}

// [F(r,s) - F(s,r)] / (r - s)
inline LogSignedReal f_difference_ratio(int r, int s) {
  return (f_function(r, s) - f_function(s, r)) / LogSignedReal::from_double(static_cast<double>(r - s));
}

}  // namespace sign_binning_detail

/// Integral of e^{-x^2} H_r(x) H_s(x) over the positive half-line.
inline double hermite_halfline_overlap(int r, int s) {
  if (r < 0 || s < 0) throw std::invalid_argument("hermite_halfline_overlap: degrees must be non-negative");
  using numerics::LogSignedReal;
  if (r == s) {
    return std::exp((r - 1) * std::numbers::ln2 + numerics::log_factorial(r)) * std::sqrt(std::numbers::pi);
  }
  const LogSignedReal prefactor = LogSignedReal::from_log(std::log(std::numbers::pi) + (r + s) * std::numbers::ln2, 1);
  return (prefactor * sign_binning_detail::f_difference_ratio(r, s)).to_double();
}

/// g_{r,s}(phi, m) without the cos[phi (r - s)] factor, in log-signed form.
inline numerics::LogSignedReal g_rs_amplitude(int r, int s, int m) {
  using numerics::LogSignedReal;
  if ((r - s) % 2 == 0) return LogSignedReal::zero();
  const double log_prefactor =
      0.5 * m * (std::log(std::numbers::pi) + (r + s) * std::numbers::ln2 - numerics::log_factorial(r) -
                 numerics::log_factorial(s));
  return LogSignedReal::from_log(log_prefactor, 1) * sign_binning_detail::f_difference_ratio(r, s).pow(m);
}

inline double g_rs(int r, int s, double phi, int m) {
  if (!(r > s && s >= 0)) throw std::invalid_argument("g_rs: requires r > s >= 0");
  if (m < 1) throw std::invalid_argument("g_rs: mode count must be at least 1");
  return g_rs_amplitude(r, s, m).to_double() * std::cos(phi * (r - s));
}

/// G(phi, m) = 2 sum_{r>s} c_r c_s g_{r,s}(phi, m)
inline double g_function(const FockCorrelatedState& state, double phi) {
  const int m = state.modes();
  const auto& c = state.coefficients();
  double acc = 0.0;
  for (int r = 1; r < state.truncation(); ++r) {
    for (int s = (r % 2 == 0) ? 1 : 0; s < r; s += 2) {
      const double cr = c[static_cast<std::size_t>(r)];
      const double cs = c[static_cast<std::size_t>(s)];
      if (cr == 0.0 || cs == 0.0) continue;
      acc += cr * cs * g_rs(r, s, phi, m);
    }
  }
  return 2.0 * acc;
}

/// Sign-binned m-party correlator E(phi, m) = 2^m G(phi, m).
inline double correlator_E(const FockCorrelatedState& state, double phi) {
  return std::ldexp(g_function(state, phi), state.modes());
}

/// P_d = 1/2^m + sigma(d) G(phi, m)
inline double outcome_probability(const FockCorrelatedState& state, double phi, const BinnedOutcome& outcome) {
  if (static_cast<int>(outcome.signs.size()) != state.modes()) {
    throw std::invalid_argument("outcome_probability: outcome length must equal the mode count");
  }
  return std::ldexp(1.0, -state.modes()) + outcome.sigma() * g_function(state, phi);
}

struct OutcomeDistribution {
  /// Indexed as BinnedOutcome::from_index.
  std::vector<double> probabilities;
  /// Set when some probability is below -1e-12, i.e. the coefficients lie
  /// outside the regime where the closed form describes a physical state.
  std::optional<std::string> diagnostic;
};

inline OutcomeDistribution outcome_distribution(const FockCorrelatedState& state, double phi) {
  const int m = state.modes();
  const double g = g_function(state, phi);
  OutcomeDistribution out;
  for (unsigned i = 0; i < (1U << m); ++i) {
    const double p = std::ldexp(1.0, -m) + BinnedOutcome::from_index(m, i).sigma() * g;
    out.probabilities.push_back(p);
    if (p < -1e-12 && !out.diagnostic) {
      std::ostringstream msg;
      msg << "negative outcome probability " << p << " at pattern " << i;
      out.diagnostic = msg.str();
    }
  }
  return out;
}

/// theta_k = (-1)^{m+1} pi (k-1) / (2m), theta'_k = theta_k + pi/2
inline AngleSettings ghz_like_angles(int m) {
  if (m < 2) throw std::invalid_argument("ghz_like_angles: requires m >= 2");
  const double sign = (m % 2 == 1) ? 1.0 : -1.0;
  std::vector<double> theta;
  std::vector<double> theta_primed;
  for (int k = 1; k <= m; ++k) {
    const double t = sign * std::numbers::pi * (k - 1) / (2.0 * m);
    theta.push_back(t);
    theta_primed.push_back(t + std::numbers::pi / 2.0);
  }
  return {theta, theta_primed};
}

/// Two-party settings with phase sums (phi, -phi, -phi, -3 phi) on
/// (uu, up, pu, pp), so that B_2 = 3 E(phi) - E(3 phi). Party 1 unprimed is
/// fixed at 0. At phi = pi/4 this coincides with ghz_like_angles(2) up to the
/// sign of every phase sum.
inline AngleSettings munro_angles(double phi) {
  return {{0.0, phi}, {-2.0 * phi, -phi}};
}

/// Angle family used by the state optimizer: the phi = pi/4 family for two
/// parties and GHZ-like angles otherwise.
inline AngleSettings default_angles(int m) {
  return m == 2 ? munro_angles(std::numbers::pi / 4.0) : ghz_like_angles(m);
}

inline double bell_factor_sign(const FockCorrelatedState& state, const AngleSettings& angles) {
  if (angles.parties() != state.modes()) {
    throw std::invalid_argument("bell_factor_sign: state and angles disagree on the party count");
  }
  const MKExpansion expansion = expand_mk(state.modes());
  return bell_factor(expansion, [&](const SettingTuple& t) { return correlator_E(state, angles.phase_sum(t)); });
}

/// Matrix whose quadratic form in the coefficient vector is <B_m>:
/// entry (r, s) = sum over MK terms of coeff * 2^m * g_{max,min}(phi_term, m),
/// zero diagonal.
inline numerics::SymmetricMatrix bell_matrix(int m, int d, const AngleSettings& angles) {
  if (d < 2) throw std::invalid_argument("bell_matrix: truncation must be at least 2");
  if (angles.parties() != m) throw std::invalid_argument("bell_matrix: angles must cover m parties");
  const MKExpansion expansion = expand_mk(m);
  std::vector<std::pair<double, double>> term_phases;
  for (const auto& [tuple, c] : expansion.terms) term_phases.emplace_back(c.to_double(), angles.phase_sum(tuple));

  numerics::SymmetricMatrix matrix(static_cast<std::size_t>(d));
  for (int r = 1; r < d; ++r) {
    for (int s = (r % 2 == 0) ? 1 : 0; s < r; s += 2) {
      const double amplitude = std::ldexp(g_rs_amplitude(r, s, m).to_double(), m);
      if (amplitude == 0.0) continue;
      double entry = 0.0;
      for (const auto& [coeff, phi] : term_phases) entry += coeff * std::cos(phi * (r - s));
      matrix.set(static_cast<std::size_t>(r), static_cast<std::size_t>(s), amplitude * entry);
    }
  }
  return matrix;
}

struct OptimizedState {
  double bell = 0.0;
  FockCorrelatedState state;
  double residual = 0.0;
};

inline OptimizedState optimize_state(int m, int d, const AngleSettings& angles,
                                     numerics::EigenConstraint constraint = numerics::EigenConstraint::none) {
  const auto matrix = bell_matrix(m, d, angles);
  auto pair = numerics::max_eigenpair(matrix, constraint);
  return {pair.value, FockCorrelatedState::normalized(m, pair.vector), pair.residual};
}

struct ConvergedOptimum {
  double bell = 0.0;
  int truncation = 0;
  bool converged = false;
  /// (d, bell) at each step of the sweep.
  std::vector<std::pair<int, double>> history;
};

/// Raises the truncation in steps until the optimal Bell value changes by
/// less than `threshold` per step, or `d_max` is reached.
inline ConvergedOptimum converge_optimum(int m, const AngleSettings& angles, int d_max = 60, int step = 10,
                                         double threshold = 5e-4,
                                         numerics::EigenConstraint constraint = numerics::EigenConstraint::none) {
  if (step < 1) throw std::invalid_argument("converge_optimum: step must be positive");
  ConvergedOptimum out;
  double previous = 0.0;
  for (int d = std::max(2, d_max % step == 0 ? step : d_max % step); d <= d_max; d += step) {
    const double bell = optimize_state(m, d, angles, constraint).bell;
    if (!out.history.empty()) out.converged = std::abs(bell - previous) < threshold;
    out.history.emplace_back(d, bell);
    out.bell = bell;
    out.truncation = d;
    previous = bell;
  }
  return out;
}

}  // namespace bellscope
