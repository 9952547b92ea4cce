#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "bellscope/coherent.hpp"
#include "bellscope/mk.hpp"
#include "bellscope/numerics/quadrature.hpp"

namespace bellscope {

enum class Quadrature { x, p };

/// Which quadrature the unprimed setting measures; the primed setting
/// measures the other one.
enum class Labeling { x_unprimed, p_unprimed };

inline Quadrature quadrature_for(Setting setting, Labeling labeling) {
  const bool unprimed = setting == Setting::unprimed;
  return (unprimed == (labeling == Labeling::x_unprimed)) ? Quadrature::x : Quadrature::p;
}

/// Number of parties measuring X for a setting tuple under a labeling.
inline int x_count(const SettingTuple& tuple, Labeling labeling) {
  const int primed = tuple.primed_count();
  return labeling == Labeling::x_unprimed ? static_cast<int>(tuple.size()) - primed : primed;
}

/// Real even f and real odd g (unit norm), with f~ the Fourier transform of
/// f and i h~ that of g. Root lists are the sign changes of f g and f~ h~
/// inside the integration windows [-x_limit, x_limit], [-p_limit, p_limit].
struct ParityFunctionPair {
  std::function<double(double)> f;
  std::function<double(double)> g;
  std::function<double(double)> f_tilde;
  std::function<double(double)> h_tilde;
  std::vector<double> x_roots;
  std::vector<double> p_roots;
  double x_limit = 0.0;
  double p_limit = 0.0;

  double x_product(double x) const { return f(x) * g(x); }
  double p_product(double p) const { return f_tilde(p) * h_tilde(p); }
};

/// Throws std::invalid_argument when norms, parities or root ordering fail.
inline void validate_pair(const ParityFunctionPair& pair, double tol = 1e-8) {
  auto sq = [](const std::function<double(double)>& fn) {
    return [&fn](double x) {
      const double v = fn(x);
      return v * v;
    };
  };
  const double inf = numerics::kInfinity;
  const double norms[] = {numerics::integrate_1d(sq(pair.f), -inf, inf, 1e-12),
                          numerics::integrate_1d(sq(pair.g), -inf, inf, 1e-12),
                          numerics::integrate_1d(sq(pair.f_tilde), -inf, inf, 1e-12),
                          numerics::integrate_1d(sq(pair.h_tilde), -inf, inf, 1e-12)};
  for (double n : norms) {
    if (std::abs(n - 1.0) > tol) throw std::invalid_argument("ParityFunctionPair: functions must be unit-norm");
  }
  for (int i = 0; i <= 200; ++i) {
    const double x = -10.0 + 0.1 * i;
    if (std::abs(pair.f(x) - pair.f(-x)) > tol || std::abs(pair.g(x) + pair.g(-x)) > tol ||
        std::abs(pair.f_tilde(x) - pair.f_tilde(-x)) > tol || std::abs(pair.h_tilde(x) + pair.h_tilde(-x)) > tol) {
      throw std::invalid_argument("ParityFunctionPair: parity violated on the sample grid");
    }
  }
  auto strictly_increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (!strictly_increasing(pair.x_roots) || !strictly_increasing(pair.p_roots)) {
    throw std::invalid_argument("ParityFunctionPair: root lists must be strictly increasing");
  }
}

struct BinningInterval {
  double lo;
  double hi;
  /// +1 on D^+ (product >= 0), -1 on D^-.
  int sign;
};

/// Splits [-limit, limit] at the roots; each piece carries the sign of the
/// product at its midpoint.
template <typename Product>
std::vector<BinningInterval> binning_intervals(const std::vector<double>& roots, double limit, const Product& product) {
  std::vector<double> cuts{-limit};
  for (double r : roots) {
    if (r > -limit && r < limit) cuts.push_back(r);
  }
  cuts.push_back(limit);
  std::vector<BinningInterval> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    out.push_back({cuts[i], cuts[i + 1], product(mid) >= 0.0 ? 1 : -1});
  }
  return out;
}

inline std::vector<BinningInterval> binning_intervals(const ParityFunctionPair& pair, Quadrature q) {
  if (q == Quadrature::x) {
    return binning_intervals(pair.x_roots, pair.x_limit, [&](double x) { return pair.x_product(x); });
  }
  return binning_intervals(pair.p_roots, pair.p_limit, [&](double p) { return pair.p_product(p); });
}

/// Even/odd cat pair f = c_+(|a> + |-a>), g = c_-(|a> - |-a>) in the
/// position representation, with
///   f~(p) =  2 c_+ pi^{-1/4} e^{-p^2/2} cos(sqrt(2) a p)
///   h~(p) = -2 c_- pi^{-1/4} e^{-p^2/2} sin(sqrt(2) a p).
/// f g changes sign only at 0; f~ h~ at multiples of pi / (2 sqrt(2) a).
inline ParityFunctionPair cat_pair(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("cat_pair: amplitude must be positive");
  const double c_plus = even_cat_normalization(alpha);
  const double c_minus = odd_cat_normalization(alpha);
  const double centre = std::numbers::sqrt2 * alpha;
  const double quarter_root_pi = std::sqrt(std::sqrt(std::numbers::pi));

  ParityFunctionPair pair;
  pair.f = [=](double x) {
    return c_plus * (coherent_position_wavefunction(alpha, x) + coherent_position_wavefunction(-alpha, x));
  };
  pair.g = [=](double x) {
    return c_minus * (coherent_position_wavefunction(alpha, x) - coherent_position_wavefunction(-alpha, x));
  };
  pair.f_tilde = [=](double p) { return 2.0 * c_plus * std::exp(-0.5 * p * p) * std::cos(centre * p) / quarter_root_pi; };
  pair.h_tilde = [=](double p) {
    return -2.0 * c_minus * std::exp(-0.5 * p * p) * std::sin(centre * p) / quarter_root_pi;
  };
  const double limit = 8.0 + 2.0 * centre;
  pair.x_limit = limit;
  pair.p_limit = limit;
  pair.x_roots = {0.0};
  const double spacing = std::numbers::pi / (2.0 * centre);
  const int n = static_cast<int>(std::floor(limit / spacing));
  for (int k = -n; k <= n; ++k) pair.p_roots.push_back(k * spacing);
  return pair;
}

struct Overlaps {
  double V = 0.0;
  double W = 0.0;
};

/// V = int |f g| dx, W = int |f~ h~| dp, integrated piecewise between roots.
inline Overlaps overlaps_VW(const ParityFunctionPair& pair, double tol = 1e-9) {
  auto integrate_abs = [tol](const std::vector<BinningInterval>& intervals, const auto& product) {
    const double per_piece = tol / static_cast<double>(intervals.size() + 2);
    double acc = 0.0;
    for (const auto& iv : intervals) {
      acc += numerics::integrate_1d([&](double u) { return std::abs(product(u)); }, iv.lo, iv.hi, per_piece);
    }
    return acc;
  };
  Overlaps out;
  out.V = integrate_abs(binning_intervals(pair, Quadrature::x), [&](double x) { return pair.x_product(x); });
  out.W = integrate_abs(binning_intervals(pair, Quadrature::p), [&](double p) { return pair.p_product(p); });
  return out;
}

/// Abstract root-binning configuration: overlaps V, W, state phase theta and
/// party count m.
struct RootBinningSpec {
  double V;
  double W;
  double theta;
  int m;

  RootBinningSpec(double v, double w, double phase, int parties) : V(v), W(w), theta(phase), m(parties) {
    if (!(V >= 0.0 && V <= 1.0) || !(W >= 0.0 && W <= 1.0)) {
      throw std::invalid_argument("RootBinningSpec: V and W must lie in [0, 1]");
    }
    if (m < 1) throw std::invalid_argument("RootBinningSpec: party count must be at least 1");
    if (!std::isfinite(theta)) throw std::invalid_argument("RootBinningSpec: theta must be finite");
  }
};

/// E(k, m-k) = V^k W^{m-k} cos(theta + (m-k) pi/2), k parties measuring X.
inline double class_correlator(const RootBinningSpec& spec, int k) {
  if (k < 0 || k > spec.m) throw std::invalid_argument("class_correlator: k must lie in [0, m]");
  const int p_count = spec.m - k;
  // cos(theta + n pi/2) evaluated through the quarter-turn table to keep
  // exact zeros at V = W = 1.
  double c = 0.0;
  switch (p_count % 4) {
    case 0: c = std::cos(spec.theta); break;
    case 1: c = -std::sin(spec.theta); break;
    case 2: c = -std::cos(spec.theta); break;
    default: c = std::sin(spec.theta); break;
  }
  return std::pow(spec.V, k) * std::pow(spec.W, p_count) * c;
}

inline double bell_factor_root(const RootBinningSpec& spec, Labeling labeling) {
  const auto expansion = expand_mk(spec.m);
  return bell_factor(expansion, [&](const SettingTuple& t) { return class_correlator(spec, x_count(t, labeling)); });
}

/// <B_m> = A cos(theta) + B sin(theta) for fixed V, W, m and labeling.
inline std::pair<double, double> theta_harmonics(double V, double W, int m, Labeling labeling) {
  const double a = signed_bell_value(expand_mk(m), [&](const SettingTuple& t) {
    return class_correlator(RootBinningSpec(V, W, 0.0, m), x_count(t, labeling));
  });
  const double b = signed_bell_value(expand_mk(m), [&](const SettingTuple& t) {
    return class_correlator(RootBinningSpec(V, W, std::numbers::pi / 2.0, m), x_count(t, labeling));
  });
  return {a, b};
}

/// max over theta of bell_factor_root, i.e. sqrt(A^2 + B^2).
inline double bell_factor_root_max_theta(double V, double W, int m, Labeling labeling) {
  const auto [a, b] = theta_harmonics(V, W, m, labeling);
  return std::hypot(a, b);
}

inline double bell_factor_root_best_labeling(const RootBinningSpec& spec) {
  return std::max(bell_factor_root(spec, Labeling::x_unprimed), bell_factor_root(spec, Labeling::p_unprimed));
}

/// theta_m = (1 - m) pi / 4
inline double optimal_phase(int m) {
  if (m < 1) throw std::invalid_argument("optimal_phase: party count must be at least 1");
  return (1 - m) * std::numbers::pi / 4.0;
}

/// (m, B_m) at V = W = 1 and theta = optimal_phase(m), for m = 2..m_max.
inline std::vector<std::pair<int, double>> maximal_violation_curve(int m_max) {
  if (m_max < 2) throw std::invalid_argument("maximal_violation_curve: m_max must be at least 2");
  std::vector<std::pair<int, double>> out;
  for (int m = 2; m <= m_max; ++m) {
    out.emplace_back(m, bell_factor_root(RootBinningSpec(1.0, 1.0, optimal_phase(m), m), Labeling::x_unprimed));
  }
  return out;
}

/// Per-mode root-binned integrals of the amplitude products entering
/// |(F + e^{i theta} G)|^2, where (F, G) = (f, g) for X and (f~, i h~) for P:
/// ff = int s |F|^2, gg = int s |G|^2, gf = int s G conj(F), s = +-1 on D^+-.
struct RootModeIntegrals {
  double ff = 0.0;
  double gg = 0.0;
  Complex gf{};
};

inline RootModeIntegrals root_mode_integrals(const ParityFunctionPair& pair, Quadrature q, double tol = 1e-10) {
  const auto intervals = binning_intervals(pair, q);
  const double piece_tol = tol / static_cast<double>(intervals.size() + 2);
  const auto& F = q == Quadrature::x ? pair.f : pair.f_tilde;
  const auto& G = q == Quadrature::x ? pair.g : pair.h_tilde;
  RootModeIntegrals acc;
  for (const auto& iv : intervals) {
    acc.ff += iv.sign * numerics::integrate_1d([&](double u) { return F(u) * F(u); }, iv.lo, iv.hi, piece_tol);
    acc.gg += iv.sign * numerics::integrate_1d([&](double u) { return G(u) * G(u); }, iv.lo, iv.hi, piece_tol);
    acc.gf += iv.sign * numerics::integrate_1d([&](double u) { return G(u) * F(u); }, iv.lo, iv.hi, piece_tol);
  }
  if (q == Quadrature::p) acc.gf *= Complex{0.0, 1.0};
  return acc;
}

struct DirectCorrelator {
  double value = 0.0;
  /// Contribution of the |f...|^2 and |g...|^2 terms; vanishes by parity.
  double even_terms = 0.0;
};

/// Root-binned correlator of (f^{(x)m} + e^{i theta} g^{(x)m}) / sqrt(2) for
/// per-party quadratures, by direct integration of the joint density over the
/// binning domains (the density factorizes term by term).
inline DirectCorrelator direct_product_correlator(const ParityFunctionPair& pair, double theta,
                                                  const std::vector<Quadrature>& settings, double tol = 1e-10) {
  const RootModeIntegrals x_mode = root_mode_integrals(pair, Quadrature::x, tol);
  const RootModeIntegrals p_mode = root_mode_integrals(pair, Quadrature::p, tol);
  double prod_ff = 1.0;
  double prod_gg = 1.0;
  Complex prod_gf{1.0, 0.0};
  for (Quadrature q : settings) {
    const RootModeIntegrals& mi = q == Quadrature::x ? x_mode : p_mode;
    prod_ff *= mi.ff;
    prod_gg *= mi.gg;
    prod_gf *= mi.gf;
  }
  DirectCorrelator out;
  out.even_terms = 0.5 * (prod_ff + prod_gg);
  out.value = out.even_terms + (std::polar(1.0, theta) * prod_gf).real();
  return out;
}

/// Binned outcome statistics of a coherent superposition under per-mode
/// quadrature settings and root binning.
struct BinnedStatistics {
  /// Bit t of the index set means mode t landed in D^-.
  std::vector<double> probabilities;
  double correlator = 0.0;
  double total = 0.0;
};

/// Every domain integral factorizes into per-mode 1-D integrals of products
/// of coherent wavefunctions over the root intervals.
inline BinnedStatistics binned_statistics(const CoherentSuperposition& state, const std::vector<Quadrature>& settings,
                                          const ParityFunctionPair& binning, double tol = 1e-12) {
  const std::size_t n = state.n_modes();
  if (settings.size() != n) throw std::invalid_argument("binned_statistics: one quadrature per mode required");
  const auto& terms = state.terms();
  const std::size_t nt = terms.size();

  const auto x_intervals = binning_intervals(binning, Quadrature::x);
  const auto p_intervals = binning_intervals(binning, Quadrature::p);

  // Integrals of phi_j conj(phi_l) over D^+ and D^-, cached by quadrature
  // and the amplitude pair.
  using Key = std::tuple<int, double, double>;
  std::map<Key, std::pair<Complex, Complex>> cache;
  auto domain_integrals = [&](Quadrature q, double aj, double al) {
    const Key key{q == Quadrature::x ? 0 : 1, aj, al};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const auto& intervals = q == Quadrature::x ? x_intervals : p_intervals;
    const double piece_tol = tol / static_cast<double>(intervals.size() + 2);
    Complex plus{};
    Complex minus{};
    for (const auto& iv : intervals) {
      Complex value;
      if (q == Quadrature::x) {
        value = numerics::integrate_1d(
            [&](double x) { return coherent_position_wavefunction(aj, x) * coherent_position_wavefunction(al, x); },
            iv.lo, iv.hi, piece_tol);
      } else {
        auto integrand = [&](double p) {
          return coherent_momentum_wavefunction(aj, p) * std::conj(coherent_momentum_wavefunction(al, p));
        };
        value = {numerics::integrate_1d([&](double p) { return integrand(p).real(); }, iv.lo, iv.hi, piece_tol),
                 numerics::integrate_1d([&](double p) { return integrand(p).imag(); }, iv.lo, iv.hi, piece_tol)};
      }
      (iv.sign > 0 ? plus : minus) += value;
    }
    cache.emplace(key, std::make_pair(plus, minus));
    return std::make_pair(plus, minus);
  };

  // integrals[t][j * nt + l] = (D^+ part, D^- part)
  std::vector<std::vector<std::pair<Complex, Complex>>> integrals(n, std::vector<std::pair<Complex, Complex>>(nt * nt));
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < nt; ++j) {
      for (std::size_t l = 0; l < nt; ++l) {
        integrals[t][j * nt + l] = domain_integrals(settings[t], terms[j].amplitudes[t], terms[l].amplitudes[t]);
      }
    }
  }

  BinnedStatistics out;
  const unsigned patterns = 1U << n;
  for (unsigned d = 0; d < patterns; ++d) {
    Complex acc{};
    for (std::size_t j = 0; j < nt; ++j) {
      for (std::size_t l = 0; l < nt; ++l) {
        Complex prod = std::conj(terms[l].weight) * terms[j].weight;
        for (std::size_t t = 0; t < n; ++t) {
          const auto& [plus, minus] = integrals[t][j * nt + l];
          prod *= ((d >> t) & 1U) ? minus : plus;
        }
        acc += prod;
      }
    }
    const double probability = acc.real();
    out.probabilities.push_back(probability);
    out.total += probability;
    out.correlator += (std::popcount(d) % 2 == 0 ? 1.0 : -1.0) * probability;
  }
  return out;
}

struct Psi3BellResult {
  double alpha = 0.0;
  /// Max over the two labelings.
  double bell = 0.0;
  double bell_x_unprimed = 0.0;
  double bell_p_unprimed = 0.0;
  /// Extremes of the per-setting probability sums and of single probabilities.
  double min_total = 0.0;
  double max_total = 0.0;
  double min_probability = 0.0;
};

/// Three-party MK Bell factor of psi3_prime_state(alpha) with root binning
/// taken from cat_pair(alpha), by exact per-mode domain integration.
inline Psi3BellResult direct_bell_psi3(double alpha, double tol = 1e-12) {
  if (!(alpha > 0.0)) throw std::invalid_argument("direct_bell_psi3: amplitude must be positive");
  const auto state = psi3_prime_state(alpha);
  const auto pair = cat_pair(alpha);
  const auto expansion = expand_mk(3);
  Psi3BellResult out;
  out.alpha = alpha;
  out.min_total = 1e300;
  out.max_total = -1e300;
  out.min_probability = 1e300;
  for (Labeling labeling : {Labeling::x_unprimed, Labeling::p_unprimed}) {
    const double value = bell_factor(expansion, [&](const SettingTuple& tuple) {
      std::vector<Quadrature> settings;
      for (auto c : tuple.choices) settings.push_back(quadrature_for(c, labeling));
      const auto stats = binned_statistics(state, settings, pair, tol);
      out.min_total = std::min(out.min_total, stats.total);
      out.max_total = std::max(out.max_total, stats.total);
      for (double p : stats.probabilities) out.min_probability = std::min(out.min_probability, p);
      return stats.correlator;
    });
    (labeling == Labeling::x_unprimed ? out.bell_x_unprimed : out.bell_p_unprimed) = value;
  }
  out.bell = std::max(out.bell_x_unprimed, out.bell_p_unprimed);
  return out;
}

}  // namespace bellscope
