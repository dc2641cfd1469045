#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "conicwave/length_spectrum.hpp"
#include "conicwave/spectrum.hpp"
#include "conicwave/trace.hpp"

using namespace conicwave;

namespace {

EigenTable single_mode(double lambda, double cutoff = 1e3) {
  EigenTable t;
  t.cutoff = cutoff;
  t.entries.push_back({0, 0, std::sqrt(lambda), lambda, 1});
  return t;
}

// λ = (kπ)² for k ∈ ℤ: k = 0 once, ±k folded into mult 2
EigenTable comb(int k_max) {
  EigenTable t;
  t.cutoff = k_max * kPi;
  for (int k = 0; k <= k_max; ++k) {
    const double f = k * kPi;
    t.entries.push_back({0, k, f, f * f, k == 0 ? 1 : 2});
  }
  return t;
}

}  // namespace

TEST(PairwiseSum, MatchesSimpleSum) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (i + 1.0);
  double naive = 0.0;
  for (double x : v) naive += x;
  EXPECT_NEAR(pairwise_sum(v.data(), v.size()), naive, 1e-12);
  EXPECT_EQ(pairwise_sum(v.data(), 0), 0.0);
}

TEST(EpsLadder, LogSpaced) {
  const auto e = eps_ladder(0.02, 0.2, 8);
  ASSERT_EQ(e.size(), 8u);
  EXPECT_DOUBLE_EQ(e.front(), 0.02);
  EXPECT_DOUBLE_EQ(e.back(), 0.2);
  for (std::size_t i = 2; i < e.size(); ++i) EXPECT_NEAR(e[i] / e[i - 1], e[1] / e[0], 1e-12);
}

TEST(SmoothedTrace, SingleMode) {
  const auto t = uniform_grid(20.0, 0.01);
  const std::vector<double> eps = {0.05, 0.1, 0.5, 1.0};
  const auto s = smoothed_wave_trace(single_mode(1.0), t, eps);
  for (std::size_t e = 0; e < eps.size(); ++e)
    for (std::size_t i = 0; i < t.size(); ++i)
      EXPECT_NEAR(s.values[e][i], std::exp(-eps[e] * eps[e] / 2) * std::cos(t[i]), 1e-12);
}

TEST(SmoothedTrace, EqualsTimeConvolution) {
  // (cos * φ_ε)(t) with the unit-mass Gaussian of width ε
  const double eps = 0.3;
  const std::vector<double> t = {0.0, 0.4, 1.7, 5.0};
  const auto s = smoothed_wave_trace(single_mode(1.0), t, {eps});
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto f = [&](double u) {
      return std::cos(t[i] - u) * std::exp(-u * u / (2 * eps * eps)) / (eps * std::sqrt(2 * kPi));
    };
    const double conv = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -40 * eps, 40 * eps, 15, 1e-15);
    EXPECT_NEAR(s.values[0][i], conv, 1e-12);
  }
}

TEST(SmoothedTrace, Even) {
  const auto table = spindle_modes(Alpha::exact(2, 3), 100.0);
  const std::vector<double> t = {0.3, 1.1, 4.2, 8.0, 12.5};
  std::vector<double> neg;
  for (double x : t) neg.push_back(-x);
  const std::vector<double> eps = {0.08, 0.2};
  const auto a = smoothed_wave_trace(table, t, eps);
  const auto b = smoothed_wave_trace(table, neg, eps);
  for (std::size_t e = 0; e < eps.size(); ++e)
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(a.values[e][i], b.values[e][i], 1e-12);
}

TEST(SmoothedTrace, BitIdenticalAcrossThreadCounts) {
  const auto table = spindle_modes(Alpha::exact(2, 3), 100.0);
  const auto t = uniform_grid(6.0, 0.02);
  const auto eps = eps_ladder(0.08, 0.2, 6);
  const auto a = smoothed_wave_trace(table, t, eps, 1);
  const auto b = smoothed_wave_trace(table, t, eps, 3);
  const auto c = smoothed_wave_trace(table, t, eps, 3);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(b.values, c.values);
}

TEST(SmoothedTrace, TailCondition) {
  const auto table = spindle_modes(Alpha::exact(2, 3), 100.0);
  EXPECT_THROW(smoothed_wave_trace(table, {0.0}, {0.05}), ValidationError);
  EXPECT_NO_THROW(smoothed_wave_trace(table, {0.0}, {0.08}));
  EXPECT_THROW(smoothed_wave_trace(table, {0.0}, {}), ValidationError);
  EXPECT_THROW(smoothed_wave_trace(table, {0.0}, {-0.1}), ValidationError);
}

TEST(SmoothedTrace, WeylLawAtOrigin) {
  // T_ε(0)·ε² → 2α
  const auto table = spindle_modes(Alpha::exact(2, 3), 450.0);
  const auto s = smoothed_wave_trace(table, {0.0}, {0.02, 0.05});
  EXPECT_NEAR(s.values[0][0] * 0.02 * 0.02, 4.0 / 3.0, 0.01);
  EXPECT_NEAR(s.values[1][0] * 0.05 * 0.05, 4.0 / 3.0, 0.02);
}

TEST(HeatTrace, SingleMode) {
  EXPECT_NEAR(heat_trace(single_mode(2.5), 0.3), std::exp(-0.75), 1e-15);
}

TEST(HeatTrace, LeadingCoefficient) {
  const auto table = spindle_modes(Alpha::exact(2, 3), 450.0);
  const double v = heat_trace(table, 1e-3);
  EXPECT_NEAR(v * 1e-3 / (2.0 / 3.0), 1.0, 1e-3);
  double prev = v;
  for (double tau : {2e-3, 5e-3, 1e-2, 0.1, 1.0}) {
    const double h = heat_trace(table, tau);
    EXPECT_LT(h, prev);
    prev = h;
  }
  EXPECT_THROW(heat_trace(table, 1e-5), ValidationError);
  EXPECT_THROW(heat_trace(table, 0.0), ValidationError);
}

TEST(ScalingExponent, CombCalibration) {
  const auto table = comb(200);
  const auto t = uniform_grid(4.0, 0.002);
  const auto s = smoothed_wave_trace(table, t, eps_ladder(8.0 / table.cutoff, 0.2, 8));
  const auto fit = scaling_exponent(s, 2.0, 0.05);
  EXPECT_FALSE(fit.degenerate);
  EXPECT_NEAR(fit.exponent, 1.0, 0.05);
  const auto off = scaling_exponent(s, 1.0, 0.05);
  EXPECT_LT(off.exponent, 0.3);
}

TEST(ScalingExponent, OriginOfSpindle) {
  const auto table = spindle_modes(Alpha::exact(2, 3), 450.0);
  const auto s = smoothed_wave_trace(table, uniform_grid(0.1, 0.005), eps_ladder(0.02, 0.2, 8));
  EXPECT_NEAR(scaling_exponent(s, 0.0, 0.05).exponent, 2.0, 0.1);
}

TEST(ScalingExponent, DegenerateAndErrors) {
  EigenTable silent = single_mode(1.0);
  silent.entries[0].mult = 0;
  const auto eps = eps_ladder(0.05, 0.2, 6);
  const auto s = smoothed_wave_trace(silent, uniform_grid(1.0, 0.01), eps);
  const auto fit = scaling_exponent(s, 0.5, 0.05);
  EXPECT_TRUE(fit.degenerate);
  EXPECT_EQ(fit.exponent, 0.0);
  const auto few = smoothed_wave_trace(single_mode(1.0), {0.0}, {0.1, 0.2});
  EXPECT_THROW(scaling_exponent(few, 0.0, 0.05), ValidationError);
}

TEST(SingularityReport, EmptyTable) {
  EigenTable empty;
  empty.cutoff = 450.0;
  const auto s = smoothed_wave_trace(empty, uniform_grid(13.0, 0.005), eps_ladder(0.02, 0.2, 8));
  const auto rep = singularity_report(s, length_sets(ConicModel::spindle(Alpha::exact(2, 3)), 13.0));
  EXPECT_TRUE(rep.insufficient_data);
  EXPECT_TRUE(rep.entries.empty());
}

TEST(SingularityReport, SphereSingularitiesAreGeometric) {
  const auto model = ConicModel::spindle(Alpha::exact(1, 1));
  const auto table = spindle_modes(model.alpha_param(), 450.0);
  const auto s = smoothed_wave_trace(table, uniform_grid(13.0, 0.005), eps_ladder(0.02, 0.2, 8));
  const auto rep = singularity_report(s, length_sets(model, 13.0));
  EXPECT_FALSE(rep.insufficient_data);
  std::vector<double> found;
  for (const auto& e : rep.entries) {
    if (!e.detected) continue;
    found.push_back(e.t0);
    EXPECT_EQ(e.cls, SingularClass::Geometric) << e.t0;
  }
  ASSERT_EQ(found.size(), 2u);
  EXPECT_NEAR(found[0], kTwoPi, 0.02);
  EXPECT_NEAR(found[1], 2 * kTwoPi, 0.02);
  EXPECT_TRUE(rep.no_singularity_off_dif);
  EXPECT_TRUE(rep.all_dif_detected);
  EXPECT_TRUE(rep.origin_matches);
}
