#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellscope/error.hpp"

namespace bellscope {

/// Exact rational with a positive denominator in lowest terms. Mermin-Klyshko
/// coefficients are dyadic, so int64 is ample for any party count we expand.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    normalize();
  }

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_zero() const { return num_ == 0; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  Rational operator-() const { return {-num_, den_}; }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

  std::string to_string() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

enum class Setting : std::uint8_t { unprimed = 0, primed = 1 };

/// One measurement-setting choice per party. Ordered lexicographically with
/// unprimed before primed.
struct SettingTuple {
  std::vector<Setting> choices;

  std::size_t size() const { return choices.size(); }
  bool primed(std::size_t party) const { return choices[party] == Setting::primed; }

  int primed_count() const {
    int k = 0;
    for (auto c : choices) k += c == Setting::primed ? 1 : 0;
    return k;
  }

  SettingTuple flipped() const {
    SettingTuple out = *this;
    for (auto& c : out.choices) c = c == Setting::primed ? Setting::unprimed : Setting::primed;
    return out;
  }

  SettingTuple extended(Setting last) const {
    SettingTuple out = *this;
    out.choices.push_back(last);
    return out;
  }

  /// "u"/"p" per party, e.g. "uup".
  std::string to_string() const {
    std::string s;
    for (auto c : choices) s.push_back(c == Setting::primed ? 'p' : 'u');
    return s;
  }

  static SettingTuple parse(const std::string& text) {
    SettingTuple out;
    for (char ch : text) {
      if (ch == 'u') {
        out.choices.push_back(Setting::unprimed);
      } else if (ch == 'p') {
        out.choices.push_back(Setting::primed);
      } else {
        throw std::invalid_argument("SettingTuple: expected only 'u' and 'p' in \"" + text + "\"");
      }
    }
    return out;
  }

  friend auto operator<=>(const SettingTuple&, const SettingTuple&) = default;
};

/// Fully expanded Mermin-Klyshko operator B_m.
struct MKExpansion {
  int m = 0;
  /// Nonzero coefficients only, in lexicographic tuple order.
  std::map<SettingTuple, Rational> terms;
  /// Coefficients collapsed by primed count; meaningful when correlators
  /// depend only on how many parties use the primed setting.
  std::map<int, Rational> alpha;

  Rational coefficient(const SettingTuple& tuple) const {
    auto it = terms.find(tuple);
    return it == terms.end() ? Rational{} : it->second;
  }

  /// B'_m: every O exchanged with O'.
  MKExpansion primed_twin() const {
    MKExpansion out;
    out.m = m;
    for (const auto& [tuple, c] : terms) out.terms.emplace(tuple.flipped(), c);
    for (const auto& [k, c] : alpha) out.alpha.emplace(m - k, c);
    return out;
  }
};

namespace detail {

using TermMap = std::map<SettingTuple, Rational>;

inline void accumulate(TermMap& into, const SettingTuple& tuple, const Rational& value) {
  auto [it, inserted] = into.emplace(tuple, value);
  if (!inserted) it->second += value;
}

inline void prune(TermMap& terms) {
  std::erase_if(terms, [](const auto& kv) { return kv.second.is_zero(); });
}

}  // namespace detail

inline std::map<int, Rational> collapse_by_primed_count(const std::map<SettingTuple, Rational>& terms) {
  std::map<int, Rational> alpha;
  for (const auto& [tuple, c] : terms) alpha[tuple.primed_count()] += c;
  std::erase_if(alpha, [](const auto& kv) { return kv.second.is_zero(); });
  return alpha;
}

/// Expands B_m = B_{m-1}/2 (O_m + O'_m) + B'_{m-1}/2 (O_m - O'_m) from
/// B_1 = 2 O_1, B'_1 = 2 O'_1.
inline MKExpansion expand_mk(int m) {
  if (m < 1) throw std::invalid_argument("expand_mk: party count must be at least 1");
  using detail::accumulate;
  const Rational half{1, 2};
  detail::TermMap b{{SettingTuple{{Setting::unprimed}}, Rational{2}}};
  detail::TermMap b_twin{{SettingTuple{{Setting::primed}}, Rational{2}}};
  for (int t = 2; t <= m; ++t) {
    detail::TermMap next;
    detail::TermMap next_twin;
    for (const auto& [tuple, c] : b) {
      accumulate(next, tuple.extended(Setting::unprimed), c * half);
      accumulate(next, tuple.extended(Setting::primed), c * half);
      // B'_t carries B_{t-1}/2 (O'_t - O_t).
      accumulate(next_twin, tuple.extended(Setting::primed), c * half);
      accumulate(next_twin, tuple.extended(Setting::unprimed), -(c * half));
    }
    for (const auto& [tuple, c] : b_twin) {
      accumulate(next, tuple.extended(Setting::unprimed), c * half);
      accumulate(next, tuple.extended(Setting::primed), -(c * half));
      accumulate(next_twin, tuple.extended(Setting::primed), c * half);
      accumulate(next_twin, tuple.extended(Setting::unprimed), c * half);
    }
    detail::prune(next);
    detail::prune(next_twin);
    b = std::move(next);
    b_twin = std::move(next_twin);
  }
  MKExpansion out;
  out.m = m;
  out.terms = std::move(b);
  out.alpha = collapse_by_primed_count(out.terms);
  return out;
}

class ExhaustionLimitExceeded : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kDefaultExhaustionLimit = 4;

/// Maximum of |<B_m>| over every deterministic +-1 assignment to (O_t, O'_t).
/// Enumerates 2^(2m) strategies and refuses beyond `limit` parties.
inline double classical_bound_exhaustive(const MKExpansion& expansion, int limit = kDefaultExhaustionLimit) {
  const int m = expansion.m;
  if (m > limit) {
    std::ostringstream msg;
    msg << "classical_bound_exhaustive: m = " << m << " exceeds the exhaustion limit " << limit;
    throw ExhaustionLimitExceeded(msg.str());
  }
  Rational best{};
  const std::uint64_t strategies = std::uint64_t{1} << (2 * m);
  for (std::uint64_t s = 0; s < strategies; ++s) {
    Rational value{};
    for (const auto& [tuple, c] : expansion.terms) {
      int sign = 1;
      for (int t = 0; t < m; ++t) {
        const int bit = 2 * t + (tuple.primed(static_cast<std::size_t>(t)) ? 1 : 0);
        if ((s >> bit) & 1U) sign = -sign;
      }
      value += sign > 0 ? c : -c;
    }
    if (value < Rational{}) value = -value;
    if (best < value) best = value;
  }
  return best.to_double();
}

/// Largest quantum value of the MK Bell factor, 2^((m+1)/2).
inline double quantum_bound(int m) {
  if (m < 1) throw std::invalid_argument("quantum_bound: party count must be at least 1");
  return std::pow(2.0, 0.5 * (m + 1));
}

/// Signed sum over the expansion, coefficient times correlator(tuple).
template <typename Correlator>
double signed_bell_value(const MKExpansion& expansion, const Correlator& correlator) {
  double acc = 0.0;
  for (const auto& [tuple, c] : expansion.terms) {
    const double e = correlator(tuple);
    if (!std::isfinite(e)) {
      throw NumericalError("bell_factor: correlator is not finite for setting " + tuple.to_string());
    }
    acc += c.to_double() * e;
  }
  return acc;
}

/// |<B_m>| for a correlator defined on setting tuples.
template <typename Correlator>
double bell_factor(const MKExpansion& expansion, const Correlator& correlator) {
  return std::abs(signed_bell_value(expansion, correlator));
}

}  // namespace bellscope
