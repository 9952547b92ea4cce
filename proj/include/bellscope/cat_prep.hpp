#pragma once

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bellscope/coherent.hpp"
#include "bellscope/error.hpp"

namespace bellscope {

/// Output labelling of a balanced beam splitter acting on (a, b):
/// sum_first sends (a + b)/sqrt(2) to slot a and (a - b)/sqrt(2) to slot b;
/// difference_first swaps the two outputs.
enum class PortConvention { sum_first, difference_first };

struct BSNetwork {
  std::vector<std::pair<std::size_t, std::size_t>> splitters;
};

inline CoherentSuperposition bs_transform(const CoherentSuperposition& state, std::size_t a, std::size_t b,
                                          PortConvention ports = PortConvention::sum_first) {
  if (a == b) throw std::invalid_argument("bs_transform: beam splitter needs two distinct modes");
  if (a >= state.n_modes() || b >= state.n_modes()) throw std::invalid_argument("bs_transform: mode out of range");
  std::vector<CoherentTerm> terms;
  terms.reserve(state.terms().size());
  for (auto t : state.terms()) {
    const double sum = (t.amplitudes[a] + t.amplitudes[b]) / std::numbers::sqrt2;
    const double diff = (t.amplitudes[a] - t.amplitudes[b]) / std::numbers::sqrt2;
    t.amplitudes[a] = ports == PortConvention::sum_first ? sum : diff;
    t.amplitudes[b] = ports == PortConvention::sum_first ? diff : sum;
    terms.push_back(std::move(t));
  }
  return CoherentSuperposition(state.n_modes(), std::move(terms)).merged();
}

inline CoherentSuperposition apply_network(CoherentSuperposition state, const BSNetwork& network,
                                           PortConvention ports = PortConvention::sum_first) {
  for (const auto& [a, b] : network.splitters) state = bs_transform(state, a, b, ports);
  return state;
}

struct HomodyneOutcome {
  /// Normalized state of the unmeasured modes.
  CoherentSuperposition conditional;
  /// Outcome probability density at x0.
  double density;
};

/// Projects `mode` onto the position eigenstate |x0> and drops it.
inline HomodyneOutcome homodyne_project(const CoherentSuperposition& state, std::size_t mode, double x0) {
  if (mode >= state.n_modes()) throw std::invalid_argument("homodyne_project: mode out of range");
  if (state.n_modes() < 2) throw std::invalid_argument("homodyne_project: no modes would remain");
  std::vector<CoherentTerm> terms;
  for (const auto& t : state.terms()) {
    CoherentTerm rest{t.weight * coherent_position_wavefunction(t.amplitudes[mode], x0), {}};
    for (std::size_t k = 0; k < t.amplitudes.size(); ++k) {
      if (k != mode) rest.amplitudes.push_back(t.amplitudes[k]);
    }
    terms.push_back(std::move(rest));
  }
  CoherentSuperposition unnormalized = CoherentSuperposition(state.n_modes() - 1, std::move(terms)).merged();
  const double density = unnormalized.inner(unnormalized).real();
  if (!(density > 1e-300)) throw NumericalError("homodyne_project: conditional state has zero norm");
  return {unnormalized.normalized(), density};
}

/// |<target|state>|^2, both normalized first.
inline double fidelity(const CoherentSuperposition& state, const CoherentSuperposition& target) {
  if (state.n_modes() != target.n_modes()) throw std::invalid_argument("fidelity: mode count mismatch");
  const double ns = state.inner(state).real();
  const double nt = target.inner(target).real();
  return std::norm(target.inner(state)) / (ns * nt);
}

/// Two balanced splitters on (a0, a1) and (a2, a3), then on (a1', a2') and
/// (a0', a3'); mode a0'' is measured.
inline BSNetwork conditional_generation_network() { return {{{0, 1}, {2, 3}, {1, 2}, {0, 3}}}; }

/// x0 at the peak of the |-alpha> component of the measured mode.
inline double nominal_conditioning_value(double alpha) { return -std::numbers::sqrt2 * alpha; }

struct PipelineResult {
  double fidelity = 0.0;
  /// Fidelity against the globally sign-flipped target.
  double fidelity_flipped = 0.0;
  double density = 0.0;
};

/// SCS^{(x)4} through the four-splitter network, homodyne conditioning of
/// mode 0 at x0, compared with psi3_prime_state(alpha) and its sign flip.
inline PipelineResult generation_pipeline(double alpha, double x0, PortConvention ports = PortConvention::sum_first) {
  if (!(alpha > 0.0)) throw std::invalid_argument("generation_pipeline: amplitude must be positive");
  const auto input = tensor_power(cat_state(alpha, true), 4);
  const auto output = apply_network(input, conditional_generation_network(), ports);
  const auto measured = homodyne_project(output, 0, x0);
  return {fidelity(measured.conditional, psi3_prime_state(alpha, 1)),
          fidelity(measured.conditional, psi3_prime_state(alpha, -1)), measured.density};
}

struct OptimalConditioning {
  double x0 = 0.0;
  PipelineResult result;
};

/// Maximizes the fidelity against psi3_prime_state over x0 within +-3 of the
/// nominal value: coarse grid, then Brent refinement around the best point.
inline OptimalConditioning optimal_conditioning(double alpha, PortConvention ports = PortConvention::sum_first) {
  const double centre = nominal_conditioning_value(alpha);
  constexpr int kGrid = 120;
  constexpr double kHalfWidth = 3.0;
  const double step = 2.0 * kHalfWidth / kGrid;
  auto objective = [&](double x0) { return -generation_pipeline(alpha, x0, ports).fidelity; };
  double best_x = centre;
  double best_value = objective(centre);
  for (int i = 0; i <= kGrid; ++i) {
    const double x = centre - kHalfWidth + i * step;
    const double v = objective(x);
    if (v < best_value) {
      best_value = v;
      best_x = x;
    }
  }
  auto [x_opt, v_opt] = boost::math::tools::brent_find_minima(objective, best_x - step, best_x + step, 40);
  if (v_opt > best_value) x_opt = best_x;
  return {x_opt, generation_pipeline(alpha, x_opt, ports)};
}

}  // namespace bellscope
