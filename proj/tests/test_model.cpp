#include <gtest/gtest.h>

#include <random>

#include "conicwave/model.hpp"

using namespace conicwave;

TEST(Alpha, ParsesRationalExactly) {
  const Alpha a = Alpha::parse("2/3");
  ASSERT_TRUE(a.is_exact());
  EXPECT_EQ(a.rational()->num, 2);
  EXPECT_EQ(a.rational()->den, 3);
  EXPECT_EQ(a.to_string(), "2/3");
  EXPECT_EQ(Alpha::parse("4/6").to_string(), "2/3");
}

TEST(Alpha, ParsesDecimal) {
  const Alpha a = Alpha::parse("0.70710678118654757");
  EXPECT_FALSE(a.is_exact());
  EXPECT_EQ(a.value(), 0.70710678118654757);
  EXPECT_EQ(Alpha::parse(a.to_string()), a);
}

TEST(Alpha, RejectsBadInput) {
  EXPECT_THROW(Alpha::parse("0"), ValidationError);
  EXPECT_THROW(Alpha::parse("-1/2"), ValidationError);
  EXPECT_THROW(Alpha::parse("1/0"), ValidationError);
  EXPECT_THROW(Alpha::parse("abc"), ValidationError);
  EXPECT_THROW(Alpha::parse("inf"), ValidationError);
  EXPECT_THROW(Alpha::parse(""), ValidationError);
}

TEST(BuildModel, SphereProfile) {
  const auto m = ConicModel::build({"spindle", "1", 1.0, "dirichlet"});
  for (double th = 0.0; th <= kPi; th += 0.01) EXPECT_EQ(m.profile(th), std::sin(th));
}

TEST(BuildModel, SpindleEquatorRadius) {
  const auto m = ConicModel::build({"spindle", "2/3", 1.0, "dirichlet"});
  EXPECT_DOUBLE_EQ(m.profile(kPi / 2), 2.0 / 3.0);
  EXPECT_EQ(m.cone_point_count(), 2);
  EXPECT_EQ(m.dimension(), 2);
}

TEST(BuildModel, FlatCone) {
  const auto m = ConicModel::build({"flatcone", "1/2", 1.0, "dirichlet"});
  EXPECT_DOUBLE_EQ(m.profile(0.4), 0.2);
  EXPECT_EQ(m.cone_point_count(), 1);
  EXPECT_EQ(m.rim_condition(), RimCondition::Dirichlet);
}

TEST(BuildModel, Errors) {
  EXPECT_THROW(ConicModel::build({"spindle", "-1", 1.0, "dirichlet"}), ValidationError);
  EXPECT_THROW(ConicModel::build({"flatcone", "1/2", 0.0, "dirichlet"}), ValidationError);
  EXPECT_THROW(ConicModel::build({"torus", "1", 1.0, "dirichlet"}), ValidationError);
  EXPECT_THROW(ConicModel::build({"flatcone", "1", 1.0, "robin"}), ValidationError);
}

TEST(Profile, ConicAsymptotics) {
  const auto m = ConicModel::spindle(Alpha::exact(2, 3));
  EXPECT_NEAR(m.profile(1e-6), 2.0 / 3.0 * 1e-6, 1e-18);
  EXPECT_NEAR(m.profile(kPi - 1e-6) / 1e-6, 2.0 / 3.0, 1e-9);
  EXPECT_THROW(m.profile(-0.1), ValidationError);
  EXPECT_THROW(m.profile(4.0), ValidationError);
  const auto f = ConicModel::flat_cone(Alpha::exact(1, 2));
  EXPECT_THROW(f.profile(1.5), ValidationError);
}

TEST(CrossSection, Examples) {
  EXPECT_NEAR(CrossSection{2.0 / 3.0}.distance(0.0, kPi), 2.0 * kPi / 3.0, 1e-15);
  EXPECT_EQ(CrossSection{0.3}.distance(1.0, 1.0), 0.0);
  EXPECT_NEAR(CrossSection{1.5}.distance(0.0, 2.0 * kPi / 3.0), kPi, 1e-15);
  EXPECT_NEAR(CrossSection{2.0 / 3.0}.circumference(), 4.0 * kPi / 3.0, 1e-15);
}

TEST(CrossSection, IsAMetric) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  for (double alpha : {0.5, 2.0 / 3.0, 1.0, 1.5}) {
    const CrossSection cs{alpha};
    for (int i = 0; i < 2000; ++i) {
      const double a = angle(rng), b = angle(rng), c = angle(rng);
      EXPECT_DOUBLE_EQ(cs.distance(a, b), cs.distance(b, a));
      EXPECT_LE(cs.distance(a, c), cs.distance(a, b) + cs.distance(b, c) + 1e-12);
      EXPECT_LE(cs.distance(a, b), cs.circumference() / 2 + 1e-12);
      EXPECT_GT(cs.distance(a, b), 0.0);
      EXPECT_EQ(cs.distance(a, a), 0.0);
    }
  }
}

TEST(BCospherePoint, ConstraintExactAtConstruction) {
  EXPECT_EQ(clairaut_constant(make_point(ConicModel::spindle(Alpha::exact(2, 3)), 0, 1.0, 0.0, kPi)), 0.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& m : {ConicModel::spindle(Alpha::exact(2, 3)), ConicModel::spindle(Alpha::exact(3, 2)),
                        ConicModel::flat_cone(Alpha::exact(1, 2), 1.0)}) {
    for (int i = 0; i < 1000; ++i) {
      const double x = 1e-6 + u(rng) * (m.coordinate_max() - 1e-6);
      const auto p = make_point(m, 0, x, u(rng) * kTwoPi, u(rng) * kTwoPi);
      EXPECT_LE(std::abs(constraint(m, p) - 1.0), 4.5e-16);  // two ulps
    }
  }
}

TEST(BCospherePoint, ChartSwitchPreservesState) {
  const auto m = ConicModel::spindle(Alpha::exact(2, 3));
  const auto p = make_point(m, 0, 1.2, 0.3, 2.0);
  const auto q = switch_chart(m, p);
  EXPECT_EQ(q.component, 1);
  EXPECT_LT(state_distance(m, p, q), 1e-15);
  EXPECT_NEAR(clairaut_constant(p), clairaut_constant(q), 1e-15);
  const auto g = to_global(m, p);
  EXPECT_LT(state_distance(m, from_global(m, g), p), 1e-15);
}
