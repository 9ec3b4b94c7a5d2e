#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wavebound/perturbation.hpp"

using namespace wavebound;

namespace {
const double kPi = std::numbers::pi;

// sigma = A - B sin(pi y / b) on |x| < delta/2. Only transverse mode n = 2
// couples through G2, so I_B has a closed form.
DensityField tilted_slab(double a, double b_coef, double delta, double width) {
  return DensityField(
      [=](double, double y) { return a - b_coef * std::sin(kPi * y / width); },
      Interval{-0.5 * delta, 0.5 * delta}, Smoothness::smooth, {}, a - std::abs(b_coef),
      "tilted slab");
}

DensityField balanced_pair() {
  return make_sum({make_slab(0.1, 0.5, -0.5), make_slab(-0.1, 0.5, 0.5)});
}
}  // namespace

TEST(FirstOrder, VanishesIdentically) {
  const StripConfig cfg(1.0);
  EXPECT_EQ(first_order(cfg, make_slab(0.1, 0.5)), 0.0);
  EXPECT_EQ(first_order(cfg, make_gaussian({0.1, 0.0, 0.0, 0.3, 0.3})), 0.0);
  EXPECT_EQ(first_order(cfg, make_zero_field()), 0.0);
}

TEST(SecondOrder, SlabMomentAndEnergy) {
  const StripConfig cfg(1.0);
  const auto r = second_order(cfg, make_slab(0.1, 0.5));
  EXPECT_TRUE(r.m1.converged);
  EXPECT_NEAR(r.m1.value, 0.025, 1e-15);
  // -pi^4 delta^2 sigma^2 / (4 b^4)
  const double series = -std::pow(kPi, 4) * 0.25 * 0.01 / 4.0;
  EXPECT_NEAR(r.e2, -0.0608806818962515, 1e-15);
  EXPECT_NEAR(r.e2 / series, 1.0, 1e-13);
}

TEST(SecondOrder, IsLiterallyASquare) {
  const StripConfig cfg(1.3);
  const auto f = make_gaussian({0.12, 0.2, -0.1, 0.3, 0.25});
  const auto r = second_order(cfg, f);
  const auto m1 = moment_m1(cfg, f);
  EXPECT_EQ(r.m1.value, m1.value);
  const double b6 = std::pow(1.3, 6);
  EXPECT_NEAR(r.e2, -std::pow(kPi, 4) / b6 * m1.value * m1.value, 1e-15 * std::abs(r.e2));
  EXPECT_EQ(r.e2, e2_from_moment(cfg, m1.value));
}

TEST(SecondOrder, ZeroAndBalancedFields) {
  const StripConfig cfg(1.0);
  EXPECT_EQ(second_order(cfg, make_zero_field()).e2, 0.0);
  const auto r = second_order(cfg, balanced_pair());
  EXPECT_LT(std::abs(r.m1.value), 1e-15);
  EXPECT_LT(std::abs(r.e2), 1e-10);
}

TEST(ThirdOrder, SlabMatchesSeriesCoefficient) {
  const StripConfig cfg(1.0);
  const auto r = third_order(cfg, make_slab(0.1, 0.5));
  EXPECT_TRUE(r.converged);
  const double series = std::pow(kPi, 6) * 0.0625 * 0.001 / 12.0;
  EXPECT_NEAR(series, 5.0072e-3, 1e-7);
  EXPECT_NEAR(r.e3 / series, 1.0, 1e-4);
  EXPECT_GT(r.e3, 0.0);
  EXPECT_LE(std::abs(r.e3 - series), 3.0 * r.err_estimate + 1e-9 * series);
}

TEST(ThirdOrder, TiltedSlabClosedForm) {
  const double b = 1.0;
  const StripConfig cfg(b);
  const double a = 0.1, bb = 0.05, d = 0.5;
  const auto f = tilted_slab(a, bb, d, b);
  const auto r = third_order(cfg, f, QuadratureSpec{1e-8, 1e-16, 400, {}, {}}, 1e-12);
  ASSERT_TRUE(r.converged);
  const double m1 = a * b * d / 2.0;
  const double i_a = std::pow(a * b / 2.0, 2) * d * d * d / 3.0;
  const double i_b = 3.4651998920139085351e-6;
  EXPECT_NEAR(r.m1.value, m1, 1e-14);
  EXPECT_NEAR(r.i_a.value, i_a, 1e-8 * i_a);
  EXPECT_NEAR(r.i_b.value, i_b, 1e-7 * i_b);
  const double e3 = 2.0 * std::pow(kPi, 6) * m1 * (i_a - b * i_b);
  EXPECT_NEAR(r.e3, e3, 1e-7 * std::abs(e3));
}

TEST(ThirdOrder, DirectRouteAgreesWithProjection) {
  const StripConfig cfg(1.0);
  const auto f = tilted_slab(0.1, 0.05, 0.5, 1.0);
  const QuadratureSpec spec{1e-3, 1e-14, 200, {}, {}};
  const auto direct = third_order_direct(cfg, f, spec, 1e-7);
  const auto proj = third_order(cfg, f, spec, 1e-7);
  EXPECT_NEAR(direct.i_b.value / proj.i_b.value, 1.0, 1e-3);
  EXPECT_NEAR(direct.e3 / proj.e3, 1.0, 1e-4);
}

TEST(ThirdOrder, VanishingMomentShortCircuits) {
  const StripConfig cfg(1.0);
  const auto r = third_order(cfg, balanced_pair());
  EXPECT_LT(std::abs(r.e3), 1e-8);
  EXPECT_EQ(third_order(cfg, make_zero_field()).e3, 0.0);
}

TEST(ThirdOrder, PrefactorStructure) {
  // e3 is linear in the supplied moment with the pair integrals held fixed.
  const StripConfig cfg(1.0);
  const auto f = make_slab(0.1, 0.5);
  const QuadResult m{0.025, 0.0, 0, true};
  const QuadResult m2{0.05, 0.0, 0, true};
  const auto a = third_order(cfg, f, m);
  const auto b = third_order(cfg, f, m2);
  EXPECT_NEAR(b.e3, 2.0 * a.e3, 1e-14);
  EXPECT_EQ(third_order(cfg, f, QuadResult{0.0, 0.0, 0, true}).e3, 0.0);
}

TEST(Assemble, SlabTotalAndVerdict) {
  const StripConfig cfg(1.0);
  const auto pe = assemble(cfg, make_slab(0.1, 0.5), 1.0);
  EXPECT_TRUE(pe.converged);
  EXPECT_DOUBLE_EQ(pe.e0, kPi * kPi);
  EXPECT_NEAR(pe.total, 9.8137309, 1e-6);
  EXPECT_EQ(pe.verdict, Verdict::bound);
  EXPECT_EQ(to_string(pe.verdict), "bound");
  // Close to the exact slab energy, which carries O(sigma^4) beyond this order.
  EXPECT_NEAR(pe.total, 9.8139114988910924598, 5e-4);
}

TEST(Assemble, EtaWeighting) {
  const StripConfig cfg(1.0);
  const auto f = make_slab(0.1, 0.5);
  const auto one = assemble(cfg, f, 1.0);
  const auto half = assemble(cfg, f, 0.5);
  EXPECT_NEAR(half.total, one.e0 + 0.25 * one.e2 + 0.125 * one.e3, 1e-14);
  EXPECT_FALSE(half.weak_coupling_warning);
  EXPECT_TRUE(assemble(cfg, f, 1.5).weak_coupling_warning);
}

TEST(Assemble, EmptyGuideIsUnbound) {
  const StripConfig cfg(1.0);
  const auto pe = assemble(cfg, make_zero_field(), 1.0);
  EXPECT_EQ(pe.total, kPi * kPi);
  EXPECT_EQ(pe.verdict, Verdict::unbound_at_this_order);
  EXPECT_EQ(to_string(pe.verdict), "unbound at this order");
}

TEST(Assemble, BalancedFieldIsUndetermined) {
  const auto pe = assemble(StripConfig(1.0), balanced_pair(), 1.0);
  EXPECT_EQ(pe.verdict, Verdict::undetermined);
  EXPECT_EQ(to_string(pe.verdict), "undetermined");
}

TEST(Assemble, RarefiedSlabIsUnbound) {
  const auto pe = assemble(StripConfig(1.0), make_slab(-0.1, 0.5), 1.0);
  EXPECT_LT(pe.m1, 0.0);
  EXPECT_EQ(pe.verdict, Verdict::unbound_at_this_order);
}
