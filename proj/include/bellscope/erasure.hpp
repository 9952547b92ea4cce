#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bellscope/mk.hpp"
#include "bellscope/numerics/quadrature.hpp"
#include "bellscope/numerics/special.hpp"
#include "bellscope/root_binning.hpp"
#include "bellscope/sign_binning.hpp"

namespace bellscope {

/// Each mode is independently replaced by vacuum with probability p.
struct ErasureChannel {
  double p;

  explicit ErasureChannel(double probability) : p(probability) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("ErasureChannel: p must lie in [0, 1]");
  }

  /// Weight p^j (1-p)^{m-j} of one erasure pattern with j erased modes.
  double pattern_weight(int erased, int m) const { return std::pow(p, erased) * std::pow(1.0 - p, m - erased); }
};

/// (1 - p)^m B_m
inline double noisy_bell_factor(double bell, double p, int m) {
  if (bell < 0.0) throw std::invalid_argument("noisy_bell_factor: Bell factor must be non-negative");
  if (m < 1) throw std::invalid_argument("noisy_bell_factor: party count must be at least 1");
  return std::pow(1.0 - ErasureChannel(p).p, m) * bell;
}

struct ErasureThreshold {
  double p_max = 0.0;
  /// False when the noise-free GHZ_m factor is already <= 2; p_max is then 0.
  bool violates = false;
};

/// Largest erasure probability at which GHZ_m with sign binning still
/// violates: solves (1 - p)^m sqrt(2) (4/pi)^{m/2} = 2, i.e.
/// p = 1 - (sqrt(pi)/2) 2^{1/(2m)}.
inline ErasureThreshold p_max_ghz(int m) {
  if (m < 1) throw std::invalid_argument("p_max_ghz: party count must be at least 1");
  const double p = 1.0 - 0.5 * std::sqrt(std::numbers::pi) * std::pow(2.0, 1.0 / (2.0 * m));
  if (p <= 0.0) return {0.0, false};
  return {p, true};
}

/// Closed-form sign-binned GHZ_m Bell factor at GHZ-like angles.
inline double ghz_bell_closed_form(int m) { return std::numbers::sqrt2 * std::pow(4.0 / std::numbers::pi, 0.5 * m); }

namespace erasure_detail {

// int sign(x) |<x|n>|^2 dx by quadrature on each half-line. The density of a
// number state does not depend on the quadrature angle.
inline double sign_binned_number_state_mean(int n, double tol) {
  auto density = [n](double x) {
    const double psi = numerics::hermite_function(n, x);
    return psi * psi;
  };
  return numerics::integrate_1d(density, 0.0, numerics::kInfinity, tol) -
         numerics::integrate_1d(density, -numerics::kInfinity, 0.0, tol);
}

}  // namespace erasure_detail

/// Sign-binned m-party correlator of the state left after erasing the modes
/// flagged in `erased` (at least one): sum_r c_r^2 (|r><r|)^{kept} (x) (|0><0|)^{erased}.
/// Evaluated mode by mode by quadrature of the number-state marginals.
inline double erased_pattern_correlator(const FockCorrelatedState& state, const std::vector<bool>& erased,
                                        double tol = 1e-12) {
  const int m = state.modes();
  if (static_cast<int>(erased.size()) != m) throw std::invalid_argument("erased_pattern_correlator: mask length");
  if (std::none_of(erased.begin(), erased.end(), [](bool e) { return e; })) {
    throw std::invalid_argument("erased_pattern_correlator: at least one mode must be erased");
  }
  std::map<int, double> mean;
  auto mode_mean = [&](int n) {
    auto it = mean.find(n);
    if (it != mean.end()) return it->second;
    const double v = erasure_detail::sign_binned_number_state_mean(n, tol);
    mean.emplace(n, v);
    return v;
  };
  double acc = 0.0;
  for (int r = 0; r < state.truncation(); ++r) {
    const double weight = state.coefficient(r) * state.coefficient(r);
    if (weight == 0.0) continue;
    double prod = 1.0;
    for (int t = 0; t < m; ++t) prod *= mode_mean(erased[static_cast<std::size_t>(t)] ? 0 : r);
    acc += weight * prod;
  }
  return acc;
}

/// Single-erasure term Tr_t(|psi><psi|) (x) |0><0|_t. `phi` is the total
/// quadrature phase of the setting; the diagonal mixture is insensitive to it.
inline double erased_term_correlator(const FockCorrelatedState& state, int erased_mode, double phi,
                                     double tol = 1e-12) {
  if (erased_mode < 0 || erased_mode >= state.modes()) {
    throw std::invalid_argument("erased_term_correlator: erased mode out of range");
  }
  if (!std::isfinite(phi)) throw std::invalid_argument("erased_term_correlator: phase must be finite");
  std::vector<bool> mask(static_cast<std::size_t>(state.modes()), false);
  mask[static_cast<std::size_t>(erased_mode)] = true;
  return erased_pattern_correlator(state, mask, tol);
}

struct NoisyBellResult {
  double bell = 0.0;
  /// Largest |correlator| over all erasure patterns with at least one erased
  /// mode and all MK settings.
  double max_erased_correlator = 0.0;
};

/// Bell factor of the full erasure mixture, summing every erasure pattern
/// with weight p^j (1-p)^{m-j}; erased patterns are evaluated, not assumed
/// to vanish.
inline NoisyBellResult noisy_bell_direct_detailed(const FockCorrelatedState& state, const AngleSettings& angles,
                                                  double p, double tol = 1e-12) {
  const ErasureChannel channel(p);
  const int m = state.modes();
  if (angles.parties() != m) throw std::invalid_argument("noisy_bell_direct: angle count must equal mode count");
  const auto expansion = expand_mk(m);
  NoisyBellResult out;
  // Erased-pattern correlators do not depend on the setting tuple.
  std::vector<double> erased_correlators(1U << m, 0.0);
  for (unsigned mask = 1; mask < (1U << m); ++mask) {
    std::vector<bool> erased(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t) erased[static_cast<std::size_t>(t)] = (mask >> t) & 1U;
    erased_correlators[mask] = erased_pattern_correlator(state, erased, tol);
    out.max_erased_correlator = std::max(out.max_erased_correlator, std::abs(erased_correlators[mask]));
  }
  const double value = signed_bell_value(expansion, [&](const SettingTuple& tuple) {
    double e = channel.pattern_weight(0, m) * correlator_E(state, angles.phase_sum(tuple));
    for (unsigned mask = 1; mask < (1U << m); ++mask) {
      e += channel.pattern_weight(std::popcount(mask), m) * erased_correlators[mask];
    }
    return e;
  });
  out.bell = std::abs(value);
  return out;
}

inline double noisy_bell_direct(const FockCorrelatedState& state, const AngleSettings& angles, double p,
                                double tol = 1e-12) {
  return noisy_bell_direct_detailed(state, angles, p, tol).bell;
}

/// Root-binned correlator after erasing the flagged modes of
/// (f^{(x)m} + e^{i theta} g^{(x)m}) / sqrt(2): the kept modes carry
/// 1/2 [ |F><F| + |G><G| + (e^{i theta} <f|g>^j |G><F| + h.c.) ] and each
/// erased mode is vacuum measured with the same binning.
inline double erased_root_correlator(const ParityFunctionPair& pair, double theta,
                                     const std::vector<Quadrature>& settings, const std::vector<bool>& erased,
                                     double tol = 1e-10) {
  if (settings.size() != erased.size()) throw std::invalid_argument("erased_root_correlator: mask length");
  const double inf = numerics::kInfinity;
  const double f_dot_g = numerics::integrate_1d([&](double x) { return pair.f(x) * pair.g(x); }, -inf, inf, tol);
  const RootModeIntegrals x_mode = root_mode_integrals(pair, Quadrature::x, tol);
  const RootModeIntegrals p_mode = root_mode_integrals(pair, Quadrature::p, tol);
  auto vacuum_mean = [&](Quadrature q) {
    const auto intervals = binning_intervals(pair, q);
    double acc = 0.0;
    for (const auto& iv : intervals) {
      acc += iv.sign * numerics::integrate_1d(
                           [](double u) {
                             const double psi = numerics::hermite_function(0, u);
                             return psi * psi;
                           },
                           iv.lo, iv.hi, tol / static_cast<double>(intervals.size() + 2));
    }
    return acc;
  };
  double prod_ff = 1.0;
  double prod_gg = 1.0;
  Complex prod_gf{1.0, 0.0};
  double vacuum = 1.0;
  int erased_count = 0;
  for (std::size_t t = 0; t < settings.size(); ++t) {
    if (erased[t]) {
      vacuum *= vacuum_mean(settings[t]);
      ++erased_count;
      continue;
    }
    const RootModeIntegrals& mi = settings[t] == Quadrature::x ? x_mode : p_mode;
    prod_ff *= mi.ff;
    prod_gg *= mi.gg;
    prod_gf *= mi.gf;
  }
  const double coherence = std::pow(f_dot_g, erased_count);
  return vacuum * (0.5 * (prod_ff + prod_gg) + (std::polar(1.0, theta) * coherence * prod_gf).real());
}

}  // namespace bellscope
