#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bellscope/root_binning.hpp"

using namespace bellscope;

namespace {

double c_plus(double a) { return 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-2.0 * a * a))); }
double c_minus(double a) { return 1.0 / std::sqrt(2.0 * (1.0 - std::exp(-2.0 * a * a))); }

// V = 2 c+ c- erf(sqrt2 alpha)
double oracle_V(double alpha) { return 2.0 * c_plus(alpha) * c_minus(alpha) * std::erf(std::numbers::sqrt2 * alpha); }

// W from the Fourier series of |sin|:
// |sin y| = 2/pi - (4/pi) sum_k cos(2ky)/(4k^2-1), with y = 2 sqrt2 alpha p.
double oracle_W(double alpha) {
  const double a = std::numbers::sqrt2 * alpha;
  double series = 2.0 / std::numbers::pi;
  for (int k = 1; k < 200; ++k) {
    series -= 4.0 / std::numbers::pi * std::exp(-4.0 * a * a * k * k) / (4.0 * k * k - 1.0);
  }
  return 2.0 * c_plus(alpha) * c_minus(alpha) * series;
}

std::vector<Quadrature> settings_for(const char* tuple, Labeling labeling) {
  std::vector<Quadrature> out;
  for (auto c : SettingTuple::parse(tuple).choices) out.push_back(quadrature_for(c, labeling));
  return out;
}

}  // namespace

TEST(RootBinning, LabelingMapsSettings) {
  EXPECT_EQ(quadrature_for(Setting::unprimed, Labeling::x_unprimed), Quadrature::x);
  EXPECT_EQ(quadrature_for(Setting::primed, Labeling::x_unprimed), Quadrature::p);
  EXPECT_EQ(quadrature_for(Setting::unprimed, Labeling::p_unprimed), Quadrature::p);
  const auto t = SettingTuple::parse("upp");
  EXPECT_EQ(x_count(t, Labeling::x_unprimed), 1);
  EXPECT_EQ(x_count(t, Labeling::p_unprimed), 2);
}

TEST(RootBinning, CatPairIsValid) {
  for (double alpha : {0.5, 1.0, 3.0}) EXPECT_NO_THROW(validate_pair(cat_pair(alpha))) << alpha;
  EXPECT_THROW(cat_pair(0.0), std::invalid_argument);
}

TEST(RootBinning, ValidationCatchesBadPair) {
  auto pair = cat_pair(1.0);
  pair.g = pair.f;
  EXPECT_THROW(validate_pair(pair), std::invalid_argument);
  pair = cat_pair(1.0);
  pair.p_roots = {1.0, 0.5};
  EXPECT_THROW(validate_pair(pair), std::invalid_argument);
}

TEST(RootBinning, CatPairMomentumIsFourierTransform) {
  // f~(p) = (2 pi)^{-1/2} int f(x) e^{-ipx} dx; g is odd so its transform
  // is -i times the sine transform, i.e. i h~.
  const double alpha = 0.8;
  const auto pair = cat_pair(alpha);
  const double inf = numerics::kInfinity;
  for (double p : {0.0, 0.4, 1.3}) {
    const double ft = numerics::integrate_1d([&](double x) { return pair.f(x) * std::cos(p * x); }, -inf, inf, 1e-12) /
                      std::sqrt(2.0 * std::numbers::pi);
    const double gt = -numerics::integrate_1d([&](double x) { return pair.g(x) * std::sin(p * x); }, -inf, inf, 1e-12) /
                      std::sqrt(2.0 * std::numbers::pi);
    EXPECT_NEAR(pair.f_tilde(p), ft, 1e-10) << p;
    EXPECT_NEAR(pair.h_tilde(p), gt, 1e-10) << p;
  }
}

TEST(RootBinning, RootsAreSignChanges) {
  const auto pair = cat_pair(1.2);
  for (double r : pair.p_roots) EXPECT_NEAR(pair.p_product(r), 0.0, 1e-12);
  for (const auto& iv : binning_intervals(pair, Quadrature::p)) {
    for (double u : {0.25, 0.5, 0.75}) {
      const double v = pair.p_product(iv.lo + u * (iv.hi - iv.lo));
      if (std::abs(v) > 1e-14) EXPECT_EQ(v > 0 ? 1 : -1, iv.sign);
    }
  }
}

TEST(RootBinning, OverlapsAgainstClosedForms) {
  for (double alpha : {0.3, 0.7, 1.0, 2.0, 6.0}) {
    const auto vw = overlaps_VW(cat_pair(alpha), 1e-11);
    EXPECT_NEAR(vw.V, oracle_V(alpha), 1e-9) << alpha;
    EXPECT_NEAR(vw.W, oracle_W(alpha), 1e-9) << alpha;
  }
  const auto large = overlaps_VW(cat_pair(6.0));
  EXPECT_NEAR(large.V, 1.0, 1e-12);
  EXPECT_NEAR(large.W, 2.0 / std::numbers::pi, 1e-9);
}

TEST(RootBinning, SpecValidation) {
  EXPECT_THROW(RootBinningSpec(1.1, 0.5, 0.0, 2), std::invalid_argument);
  EXPECT_THROW(RootBinningSpec(0.5, 0.5, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(class_correlator(RootBinningSpec(0.5, 0.5, 0.0, 2), 3), std::invalid_argument);
}

TEST(RootBinning, ClassCorrelatorMatchesCosine) {
  const RootBinningSpec spec(0.9, 0.6, 0.37, 5);
  for (int k = 0; k <= 5; ++k) {
    const double expected = std::pow(0.9, k) * std::pow(0.6, 5 - k) * std::cos(0.37 + (5 - k) * std::numbers::pi / 2);
    EXPECT_NEAR(class_correlator(spec, k), expected, 1e-15);
  }
}

TEST(RootBinning, MaximalViolationReachesQuantumBound) {
  double previous = 0.0;
  for (const auto& [m, bell] : maximal_violation_curve(8)) {
    EXPECT_NEAR(bell, std::pow(2.0, 0.5 * (m + 1)), 1e-10) << m;
    if (previous > 0.0) EXPECT_NEAR(bell, std::numbers::sqrt2 * previous, 1e-12);
    previous = bell;
  }
}

TEST(RootBinning, ThetaMaximumDominatesGrid) {
  for (int m = 2; m <= 4; ++m) {
    for (Labeling lab : {Labeling::x_unprimed, Labeling::p_unprimed}) {
      const double best = bell_factor_root_max_theta(0.8, 0.6, m, lab);
      double grid = 0.0;
      for (int i = 0; i < 2000; ++i) {
        grid = std::max(grid, bell_factor_root(RootBinningSpec(0.8, 0.6, i * std::numbers::pi / 1000, m), lab));
      }
      EXPECT_GE(best, grid - 1e-12);
      EXPECT_NEAR(best, grid, 1e-5);
    }
  }
}

TEST(RootBinning, TwoPartyCatMaximumOverTheta) {
  // CHSH with E = V^2, VW, WV, W^2 at phases (0, pi/2, pi/2, pi): sqrt((V^2+W^2)^2 + 4V^2W^2)
  const double v = 1.0;
  const double w = 2.0 / std::numbers::pi;
  const double expected = std::hypot(v * v + w * w, 2.0 * v * w);
  EXPECT_NEAR(bell_factor_root_max_theta(v, w, 2, Labeling::x_unprimed), expected, 1e-12);
  EXPECT_NEAR(expected, 1.8963, 1e-4);
}

TEST(RootBinning, ThreePartyCatAtZeroPhase) {
  // Best labeling gives V^3 + 3 V W^2 at theta = 0.
  const double w = 2.0 / std::numbers::pi;
  const RootBinningSpec spec(1.0, w, 0.0, 3);
  EXPECT_NEAR(bell_factor_root_best_labeling(spec), 1.0 + 3.0 * w * w, 1e-12);
}

TEST(RootBinning, DirectIntegrationMatchesClassModel) {
  for (double alpha : {0.6, 1.5}) {
    const auto pair = cat_pair(alpha);
    const auto vw = overlaps_VW(pair, 1e-11);
    for (const char* tuple : {"uuu", "uup", "upp", "ppp"}) {
      for (Labeling lab : {Labeling::x_unprimed, Labeling::p_unprimed}) {
        const double theta = 0.4;
        const auto direct = direct_product_correlator(pair, theta, settings_for(tuple, lab), 1e-11);
        const RootBinningSpec spec(std::min(vw.V, 1.0), std::min(vw.W, 1.0), theta, 3);
        EXPECT_NEAR(direct.value, class_correlator(spec, x_count(SettingTuple::parse(tuple), lab)), 1e-9);
        EXPECT_NEAR(direct.even_terms, 0.0, 1e-10);
      }
    }
  }
}

TEST(RootBinning, BinnedStatisticsOfCatProductState) {
  const double alpha = 1.1;
  const double theta = -0.6;
  const auto pair = cat_pair(alpha);
  const auto state = cat_product_state(alpha, 3, theta);
  EXPECT_NEAR(state.norm(), 1.0, 1e-12);
  for (const char* tuple : {"uup", "ppp"}) {
    const auto settings = settings_for(tuple, Labeling::x_unprimed);
    const auto stats = binned_statistics(state, settings, pair);
    EXPECT_NEAR(stats.total, 1.0, 1e-10);
    for (double p : stats.probabilities) EXPECT_GE(p, -1e-12);
    EXPECT_NEAR(stats.correlator, direct_product_correlator(pair, theta, settings, 1e-11).value, 1e-9);
  }
}

TEST(RootBinning, Psi3DirectIntegration) {
  const auto far = direct_bell_psi3(3.0);
  EXPECT_NEAR(far.min_total, 1.0, 1e-8);
  EXPECT_NEAR(far.max_total, 1.0, 1e-8);
  EXPECT_GT(far.bell, 2.15);
  EXPECT_LT(far.bell, 2.25);
  const auto near = direct_bell_psi3(0.5);
  EXPECT_LT(near.bell, 2.0);
  EXPECT_GE(near.min_probability, -1e-12);
}
