#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wavebound/special_functions.hpp"

using namespace wavebound::special;

TEST(Zeta, OddValues) {
  EXPECT_NEAR(zeta_int(3), 1.2020569031595942854, 1e-15);
  EXPECT_NEAR(zeta_int(5), 1.0369277551433699263, 1e-15);
}

TEST(Zeta, EvenValuesClosedForm) {
  const double p = std::numbers::pi;
  EXPECT_NEAR(zeta_int(2), p * p / 6.0, 1e-15);
  EXPECT_NEAR(zeta_int(4), p * p * p * p / 90.0, 1e-15);
}

TEST(Zeta, TrivialZerosAreExact) {
  for (int s = -2; s >= -30; s -= 2) EXPECT_EQ(zeta_int(s), 0.0) << s;
  EXPECT_DOUBLE_EQ(zeta_int(0), -0.5);
  EXPECT_DOUBLE_EQ(zeta_int(-1), -1.0 / 12.0);
}

TEST(Polylog, FrozenValues) {
  EXPECT_NEAR(polylog(2, 0.3), 0.32612951007547606953, 1e-15);
  EXPECT_NEAR(polylog(3, 0.9), 1.0496589501864398696, 1e-14);
  EXPECT_NEAR(polylog(2, 0.999), 1.6370226052761177427, 1e-13);
}

TEST(Polylog, Endpoints) {
  EXPECT_EQ(polylog(2, 0.0), 0.0);
  EXPECT_NEAR(polylog(2, 1.0), zeta_int(2), 1e-15);
  EXPECT_NEAR(polylog(3, 1.0), zeta_int(3), 1e-15);
}

TEST(Polylog, ContinuousAcrossBranchSwitch) {
  for (int s : {2, 3}) {
    const double below = polylog(s, std::nextafter(0.5, 0.0));
    const double above = polylog(s, 0.5);
    EXPECT_NEAR(below, above, 1e-14) << s;
  }
}

TEST(Polylog, DilogarithmReflection) {
  // Li2(x) + Li2(1 - x) = pi^2/6 - log(x) log(1 - x)
  for (double x : {0.1, 0.25, 0.4, 0.7, 0.95}) {
    const double lhs = polylog(2, x) + polylog(2, 1.0 - x);
    const double rhs = std::numbers::pi * std::numbers::pi / 6.0 - std::log(x) * std::log(1.0 - x);
    EXPECT_NEAR(lhs, rhs, 1e-14) << x;
  }
}

TEST(Polylog, RejectsOutOfRange) {
  EXPECT_THROW(polylog(1, 0.5), std::domain_error);
  EXPECT_THROW(polylog(2, -0.1), std::domain_error);
  EXPECT_THROW(polylog(2, 1.1), std::domain_error);
}

TEST(Zeta, PoleRejected) { EXPECT_THROW(zeta_int(1), std::domain_error); }
