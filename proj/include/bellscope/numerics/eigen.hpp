#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "bellscope/error.hpp"

namespace bellscope::numerics {

/// Dense real symmetric matrix. Writes go to both triangles.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(std::size_t dimension) : n_(dimension), data_(dimension * dimension, 0.0) {
    if (dimension == 0) throw std::invalid_argument("SymmetricMatrix: dimension must be positive");
  }

  SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows) : SymmetricMatrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != n_) throw std::invalid_argument("SymmetricMatrix: rows must be square");
      std::size_t j = 0;
      for (double v : row) data_[i * n_ + j++] = v;
      ++i;
    }
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < r; ++c) {
        if (at(r, c) != at(c, r)) throw std::invalid_argument("SymmetricMatrix: entries are not symmetric");
      }
    }
  }

  std::size_t dimension() const { return n_; }

  double at(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  void set(std::size_t i, std::size_t j, double value) {
    if (!std::isfinite(value)) throw NumericalError("SymmetricMatrix: non-finite entry");
    data_[i * n_ + j] = value;
    data_[j * n_ + i] = value;
  }

  void add(std::size_t i, std::size_t j, double value) { set(i, j, at(i, j) + value); }

  double quadratic_form(const std::vector<double>& v) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) acc += v[i] * at(i, j) * v[j];
    }
    return acc;
  }

  std::vector<double> multiply(const std::vector<double>& v) const {
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n_; ++j) acc += at(i, j) * v[j];
      out[i] = acc;
    }
    return out;
  }

  Eigen::MatrixXd to_eigen() const {
    Eigen::MatrixXd m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) m(i, j) = at(i, j);
    }
    return m;
  }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

enum class EigenConstraint { none, nonnegative };

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  /// ||Mv - lambda v|| when unconstrained; norm of the KKT violation otherwise.
  double residual = 0.0;
};

struct NonnegativeSearchOptions {
  int restarts = 32;
  std::uint64_t seed = 0x5eed5eedULL;
  int max_iterations = 200000;
  double stationarity_tolerance = 1e-8;
};

namespace detail {

inline double norm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

inline void fix_sign(std::vector<double>& v) {
  for (double x : v) {
    if (std::abs(x) > 1e-14) {
      if (x < 0.0) {
        for (double& y : v) y = -y;
      }
      return;
    }
  }
}

inline double kkt_residual(const SymmetricMatrix& m, const std::vector<double>& v, double lambda) {
  auto mv = m.multiply(v);
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double g = mv[i] - lambda * v[i];
    double violation = v[i] > 0.0 ? std::abs(g) : std::max(0.0, mv[i]);
    acc += violation * violation;
  }
  return std::sqrt(acc);
}

// Top eigenvector of the principal submatrix on the current support; accepted
// only when it lies strictly inside the orthant face.
inline bool polish_on_support(const SymmetricMatrix& m, const std::vector<double>& v, EigenPair& out) {
  const double vmax = *std::max_element(v.begin(), v.end());
  if (vmax <= 0.0) return false;
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > 1e-9 * vmax) support.push_back(i);
  }
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = m.at(support[i], support[j]);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sub);
  if (solver.info() != Eigen::Success) return false;
  Eigen::VectorXd top = solver.eigenvectors().col(k - 1);
  if (top.sum() < 0.0) top = -top;
  if (top.minCoeff() <= 0.0) return false;
  std::vector<double> candidate(v.size(), 0.0);
  for (Eigen::Index i = 0; i < k; ++i) candidate[support[i]] = top(i);
  const double lambda = m.quadratic_form(candidate);
  out = {lambda, candidate, kkt_residual(m, candidate, lambda)};
  return true;
}

inline EigenPair nonnegative_ascent(const SymmetricMatrix& m, std::vector<double> v, double shift,
                                    const NonnegativeSearchOptions& options) {
  const std::size_t n = m.dimension();
  EigenPair best{m.quadratic_form(v), v, kkt_residual(m, v, m.quadratic_form(v))};
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    // Projected power step on M + shift*I (positive semidefinite by the
    // Gershgorin shift), which never decreases the quadratic form.
    auto w = m.multiply(v);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::max(0.0, w[i] + shift * v[i]);
    const double nw = norm(w);
    if (nw == 0.0) break;
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] /= nw;
      delta = std::max(delta, std::abs(w[i] - v[i]));
    }
    v = std::move(w);
    if (iter % 64 == 63 || delta < 1e-15) {
      EigenPair polished;
      if (polish_on_support(m, v, polished) && polished.residual <= options.stationarity_tolerance) {
        return polished;
      }
      const double lambda = m.quadratic_form(v);
      best = {lambda, v, kkt_residual(m, v, lambda)};
      if (best.residual <= options.stationarity_tolerance) return best;
      if (delta < 1e-15) break;
    }
  }
  const double lambda = m.quadratic_form(v);
  return {lambda, v, kkt_residual(m, v, lambda)};
}

}  // namespace detail

/// Largest eigenvalue of a symmetric matrix and its unit eigenvector (first
/// nonzero component positive). With EigenConstraint::nonnegative, maximizes
/// v^T M v over unit vectors in the nonnegative orthant by multi-start
/// projected ascent; the value is attained by the returned vector, so it is a
/// certified lower bound on the constrained maximum.
inline EigenPair max_eigenpair(const SymmetricMatrix& m, EigenConstraint constraint = EigenConstraint::none,
                               const NonnegativeSearchOptions& options = {}) {
  const std::size_t n = m.dimension();
  if (constraint == EigenConstraint::none) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.to_eigen());
    if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed to converge");
    const auto last = static_cast<Eigen::Index>(n - 1);
    EigenPair out;
    out.value = solver.eigenvalues()(last);
    out.vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.vector[i] = solver.eigenvectors()(static_cast<Eigen::Index>(i), last);
    detail::fix_sign(out.vector);
    auto mv = m.multiply(out.vector);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = mv[i] - out.value * out.vector[i];
      acc += r * r;
    }
    out.residual = std::sqrt(acc);
    if (out.residual > 1e-10 * std::max(1.0, std::abs(out.value))) {
      std::ostringstream msg;
      msg << "eigenpair residual " << out.residual << " exceeds 1e-10";
      throw NumericalError(msg.str());
    }
    return out;
  }

  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(m.at(i, j));
    shift = std::max(shift, row);
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  EigenPair best;
  bool have_best = false;
  for (int start = 0; start < options.restarts; ++start) {
    std::vector<double> v(n);
    if (start == 0) {
      std::fill(v.begin(), v.end(), 1.0);
    } else {
      for (double& x : v) x = uniform(rng);
    }
    const double nv = detail::norm(v);
    for (double& x : v) x /= nv;
    EigenPair candidate = detail::nonnegative_ascent(m, std::move(v), shift, options);
    if (candidate.residual > options.stationarity_tolerance) continue;
    if (!have_best || candidate.value > best.value) {
      best = std::move(candidate);
      have_best = true;
    }
  }
  if (!have_best) {
    throw NumericalError("nonnegative eigen-search: no restart reached the stationarity tolerance");
  }
  return best;
}

}  // namespace bellscope::numerics
