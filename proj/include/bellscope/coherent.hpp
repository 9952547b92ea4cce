#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bellscope {

using Complex = std::complex<double>;

/// Quadrature convention: X = (a + a^dagger)/sqrt(2), so for real alpha the
/// position wavefunction of |alpha> is centred at sqrt(2) alpha.
inline double coherent_position_wavefunction(double alpha, double x) {
  const double u = x - std::numbers::sqrt2 * alpha;
  return std::exp(-0.5 * u * u) / std::sqrt(std::sqrt(std::numbers::pi));
}

/// <p|alpha> for real alpha: pi^{-1/4} exp(-p^2/2) exp(-i sqrt(2) alpha p).
inline Complex coherent_momentum_wavefunction(double alpha, double p) {
  const double envelope = std::exp(-0.5 * p * p) / std::sqrt(std::sqrt(std::numbers::pi));
  const double phase = -std::numbers::sqrt2 * alpha * p;
  return {envelope * std::cos(phase), envelope * std::sin(phase)};
}

/// <alpha|beta> for real amplitudes.
inline double coherent_overlap(double alpha, double beta) {
  const double d = alpha - beta;
  return std::exp(-0.5 * d * d);
}

struct CoherentTerm {
  Complex weight;
  std::vector<double> amplitudes;
};

/// Finite superposition sum_j w_j |alpha_j1, ..., alpha_jn> of multimode
/// coherent states with real amplitudes.
class CoherentSuperposition {
 public:
  CoherentSuperposition(std::size_t n_modes, std::vector<CoherentTerm> terms)
      : n_modes_(n_modes), terms_(std::move(terms)) {
    if (n_modes_ == 0) throw std::invalid_argument("CoherentSuperposition: needs at least one mode");
    for (const auto& t : terms_) {
      if (t.amplitudes.size() != n_modes_) {
        throw std::invalid_argument("CoherentSuperposition: term amplitude count differs from mode count");
      }
    }
  }

  std::size_t n_modes() const { return n_modes_; }
  const std::vector<CoherentTerm>& terms() const { return terms_; }

  /// <this|other>
  Complex inner(const CoherentSuperposition& other) const {
    if (other.n_modes_ != n_modes_) throw std::invalid_argument("CoherentSuperposition: mode count mismatch");
    Complex acc{};
    for (const auto& a : terms_) {
      for (const auto& b : other.terms_) {
        double overlap = 1.0;
        for (std::size_t k = 0; k < n_modes_; ++k) overlap *= coherent_overlap(a.amplitudes[k], b.amplitudes[k]);
        acc += std::conj(a.weight) * b.weight * overlap;
      }
    }
    return acc;
  }

  double norm() const { return std::sqrt(std::max(0.0, inner(*this).real())); }

  CoherentSuperposition normalized() const {
    const double n = norm();
    if (!(n > 0.0)) throw std::invalid_argument("CoherentSuperposition: zero norm");
    auto out = *this;
    for (auto& t : out.terms_) t.weight /= n;
    return out;
  }

  /// Sums the weights of terms with identical amplitude vectors and drops
  /// terms whose weight cancels exactly.
  CoherentSuperposition merged() const {
    std::map<std::vector<double>, Complex> acc;
    for (const auto& t : terms_) acc[t.amplitudes] += t.weight;
    std::vector<CoherentTerm> out;
    for (const auto& [amps, w] : acc) {
      if (w != Complex{}) out.push_back({w, amps});
    }
    return {n_modes_, std::move(out)};
  }

  CoherentSuperposition tensor(const CoherentSuperposition& other) const {
    std::vector<CoherentTerm> out;
    for (const auto& a : terms_) {
      for (const auto& b : other.terms_) {
        CoherentTerm t{a.weight * b.weight, a.amplitudes};
        t.amplitudes.insert(t.amplitudes.end(), b.amplitudes.begin(), b.amplitudes.end());
        out.push_back(std::move(t));
      }
    }
    return {n_modes_ + other.n_modes_, std::move(out)};
  }

 private:
  std::size_t n_modes_;
  std::vector<CoherentTerm> terms_;
};

/// c_+^2 = 1 / [2 (1 + e^{-2 alpha^2})]
inline double even_cat_normalization(double alpha) {
  return 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-2.0 * alpha * alpha)));
}

/// c_-^2 = 1 / [2 (1 - e^{-2 alpha^2})]
inline double odd_cat_normalization(double alpha) {
  return 1.0 / std::sqrt(2.0 * (1.0 - std::exp(-2.0 * alpha * alpha)));
}

/// Single-mode cat c_+-(|alpha> +- |-alpha>).
inline CoherentSuperposition cat_state(double alpha, bool even) {
  if (!(alpha > 0.0)) throw std::invalid_argument("cat_state: amplitude must be positive");
  const double c = even ? even_cat_normalization(alpha) : odd_cat_normalization(alpha);
  return {1, {{Complex{c}, {alpha}}, {Complex{even ? c : -c}, {-alpha}}}};
}

inline CoherentSuperposition tensor_power(const CoherentSuperposition& state, int copies) {
  if (copies < 1) throw std::invalid_argument("tensor_power: need at least one copy");
  CoherentSuperposition out = state;
  for (int k = 1; k < copies; ++k) out = out.tensor(state);
  return out;
}

/// (f^{(x)m} + e^{i theta} g^{(x)m}) / sqrt(2) with f, g the even and odd cats.
inline CoherentSuperposition cat_product_state(double alpha, int m, double theta) {
  auto even = tensor_power(cat_state(alpha, true), m);
  auto odd = tensor_power(cat_state(alpha, false), m);
  std::vector<CoherentTerm> terms;
  const Complex phase = std::polar(1.0, theta);
  for (auto t : even.terms()) {
    t.weight /= std::numbers::sqrt2;
    terms.push_back(std::move(t));
  }
  for (auto t : odd.terms()) {
    t.weight *= phase / std::numbers::sqrt2;
    terms.push_back(std::move(t));
  }
  return CoherentSuperposition(static_cast<std::size_t>(m), std::move(terms)).merged();
}

/// c'(|a,a,a> + |a,-a,-a> + |-a,a,-a> + |-a,-a,a>), c'^2 = 1 / [4 (1 + 3 e^{-4 a^2})].
/// `sign` = -1 gives the globally sign-flipped variant.
inline CoherentSuperposition psi3_prime_state(double alpha, int sign = 1) {
  if (!(alpha > 0.0)) throw std::invalid_argument("psi3_prime_state: amplitude must be positive");
  const double c = 1.0 / std::sqrt(4.0 * (1.0 + 3.0 * std::exp(-4.0 * alpha * alpha)));
  const double a = sign >= 0 ? alpha : -alpha;
  return {3,
          {{Complex{c}, {a, a, a}},
           {Complex{c}, {a, -a, -a}},
           {Complex{c}, {-a, a, -a}},
           {Complex{c}, {-a, -a, a}}}};
}

}  // namespace bellscope
