#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "wavebound/fd_oracle.hpp"
#include "wavebound/slab_oracle.hpp"

using namespace wavebound;

namespace {
const double kPi = std::numbers::pi;

double discrete_dirichlet(double length, int cells) {
  const double h = length / cells;
  const double s = std::sin(kPi * h / (2.0 * length));
  return 4.0 / (h * h) * s * s;
}
}  // namespace

TEST(Grid, Validation) {
  const StripConfig cfg(1.0);
  const auto slab = make_slab(0.1, 0.5);
  EXPECT_THROW(validate_grid(GridSpec{12.0, 8, 20, {}}, cfg, slab), DomainError);
  EXPECT_THROW(validate_grid(GridSpec{12.0, 100, 10, {}}, cfg, slab), DomainError);
  EXPECT_THROW(validate_grid(GridSpec{3.5, 100, 20, {}}, cfg, slab), DomainError);
  EXPECT_NO_THROW(validate_grid(GridSpec{3.75, 100, 20, {}}, cfg, slab));
}

TEST(LowestMode, EmptyGuideMatchesDiscreteSpectrum) {
  const StripConfig cfg(1.0);
  const GridSpec g{10.0, 80, 16, {}};
  const auto r = lowest_mode(cfg, make_zero_field(), g);
  ASSERT_TRUE(r.converged);
  const double exact = discrete_dirichlet(20.0, 80) + discrete_dirichlet(1.0, 16);
  EXPECT_NEAR(r.e_min, exact, 1e-12 * exact);
  EXPECT_GT(r.e_min, discrete_transverse_threshold(cfg, 16));
  EXPECT_LE(r.residual_norm, 1e-10);
}

TEST(LowestMode, EmptyGuideApproachesThreshold) {
  const StripConfig cfg(1.0);
  const auto small = lowest_mode(cfg, make_zero_field(), GridSpec{5.0, 50, 16, {}});
  const auto large = lowest_mode(cfg, make_zero_field(), GridSpec{20.0, 400, 64, {}});
  EXPECT_GT(small.e_min, large.e_min);
  EXPECT_GT(large.e_min, kPi * kPi);
  EXPECT_LT(large.e_min - kPi * kPi, 0.01);
}

TEST(LowestMode, VectorIsMaxNormalizedAndPositive) {
  const StripConfig cfg(1.0);
  const auto r = lowest_mode(cfg, make_slab(0.1, 0.5), GridSpec{12.0, 100, 20, {}});
  ASSERT_TRUE(r.converged);
  double mx = 0.0, mn = 1.0;
  for (double v : r.vector) {
    mx = std::max(mx, v);
    mn = std::min(mn, v);
  }
  EXPECT_EQ(mx, 1.0);
  EXPECT_GE(mn, 0.0);
  EXPECT_EQ(r.vector.size(), 99u * 19u);
  EXPECT_EQ(r.at(0, 5), 0.0);
  EXPECT_EQ(r.at(50, 20), 0.0);
  EXPECT_EQ(r.at(50, 10), 1.0);
}

TEST(LowestMode, SlabClosesAgainstExactRoot) {
  const StripConfig cfg(1.0);
  const auto f = make_slab(0.1, 0.5);
  std::vector<EigenResult> rs;
  for (int k : {1, 2, 4}) rs.push_back(lowest_mode(cfg, f, GridSpec{12.0, 100 * k, 20 * k, {}}));
  const auto ex = refine(rs);
  EXPECT_TRUE(ex.extrapolated);
  EXPECT_NEAR(ex.order, 2.0, 0.1);
  const double exact = solve_slab(cfg, SlabProfile(0.1, 0.5)).energy;
  EXPECT_LT(std::abs(ex.energy - exact) / exact, 1e-3);
  EXPECT_LT(ex.energy, kPi * kPi);
}

TEST(LowestMode, StrongBindingIsLocalized) {
  const StripConfig cfg(1.0);
  const auto r = lowest_mode(cfg, make_slab(0.2, 2.0), GridSpec{18.0, 360, 20, {}});
  ASSERT_TRUE(r.converged);
  EXPECT_LT(r.e_min, kPi * kPi);
  EXPECT_LE(r.localization, 1e-3);
}

TEST(LowestMode, BindingSlopeApproachesSeriesCoefficient) {
  const StripConfig cfg(1.0);
  const double d = 0.5;
  // Fit (E - E_empty) / sigma^2 against sigma; its intercept is the sigma^2 coefficient.
  std::vector<double> xs, ys;
  const GridSpec g{40.0, 1600, 16, {}};
  const double empty = discrete_transverse_threshold(cfg, 16);
  for (double s : {0.05, 0.1, 0.2}) {
    const double e = lowest_mode(cfg, make_slab(s, d), g).e_min;
    xs.push_back(s);
    ys.push_back((e - empty) / (s * s));
  }
  // Quadratic through three points, evaluated at sigma = 0.
  const double l0 = xs[1] * xs[2] / ((xs[0] - xs[1]) * (xs[0] - xs[2]));
  const double l1 = xs[0] * xs[2] / ((xs[1] - xs[0]) * (xs[1] - xs[2]));
  const double l2 = xs[0] * xs[1] / ((xs[2] - xs[0]) * (xs[2] - xs[1]));
  const double intercept = l0 * ys[0] + l1 * ys[1] + l2 * ys[2];
  const double target = -std::pow(kPi, 4) * d * d / 4.0;
  EXPECT_NEAR(intercept / target, 1.0, 0.05);
}

TEST(LowestMode, ExplicitShiftHonoured) {
  const StripConfig cfg(1.0);
  GridSpec g{12.0, 100, 20, 9.0};
  const auto r = lowest_mode(cfg, make_slab(0.1, 0.5), g);
  EXPECT_EQ(r.shift, 9.0);
  const auto auto_shift = lowest_mode(cfg, make_slab(0.1, 0.5), GridSpec{12.0, 100, 20, {}});
  EXPECT_NEAR(r.e_min, auto_shift.e_min, 1e-9);
}

TEST(LowestMode, ShiftAboveGroundStateRejected) {
  const StripConfig cfg(1.0);
  GridSpec g{12.0, 100, 20, 9.85};
  EXPECT_THROW(lowest_mode(cfg, make_slab(0.1, 0.5), g), EigenSolveError);
}

TEST(Refine, RichardsonIdentity) {
  std::vector<EigenResult> rs(2);
  const double c = 3.0, e = 9.5;
  rs[0].grid = GridSpec{10.0, 100, 20, {}};
  rs[1].grid = GridSpec{10.0, 200, 40, {}};
  for (auto& r : rs) r.e_min = e + c * r.grid.hx() * r.grid.hx();
  const auto ex = refine(rs);
  EXPECT_TRUE(ex.extrapolated);
  EXPECT_NEAR(ex.energy, e, 1e-13);
}

TEST(Refine, ThreeGridsGiveOrder) {
  std::vector<EigenResult> rs(3);
  for (int k = 0; k < 3; ++k) {
    rs[k].grid = GridSpec{10.0, 50 << k, 20 << k, {}};
    const double h = rs[k].grid.hx();
    rs[k].e_min = 2.0 + 0.7 * h * h + 0.1 * h * h * h * h;
  }
  const auto ex = refine(rs);
  EXPECT_NEAR(ex.order, 2.0, 0.05);
  EXPECT_NEAR(ex.energy, 2.0, 1e-4);
  EXPECT_LE(std::abs(ex.energy - 2.0), ex.error_bar);
}

TEST(Refine, NonMonotoneReportsRaw) {
  std::vector<EigenResult> rs(3);
  const double e[] = {1.0, 0.9, 0.95};
  for (int k = 0; k < 3; ++k) {
    rs[k].grid = GridSpec{10.0, 50 << k, 20 << k, {}};
    rs[k].e_min = e[k];
  }
  const auto ex = refine(rs);
  EXPECT_FALSE(ex.extrapolated);
  EXPECT_EQ(ex.energy, 0.95);
  EXPECT_EQ(ex.raw.size(), 3u);
}

TEST(Refine, Preconditions) {
  std::vector<EigenResult> one(1);
  EXPECT_THROW(refine(one), DomainError);
  std::vector<EigenResult> rs(2);
  rs[0].grid = GridSpec{10.0, 100, 20, {}};
  rs[1].grid = GridSpec{12.0, 200, 40, {}};
  EXPECT_THROW(refine(rs), DomainError);
  rs[1].grid = GridSpec{10.0, 50, 20, {}};
  EXPECT_THROW(refine(rs), DomainError);
}

TEST(Refine, EmptyGuideExtrapolatesToTruncatedContinuum) {
  const StripConfig cfg(1.0);
  std::vector<EigenResult> rs;
  for (int k : {1, 2, 4}) rs.push_back(lowest_mode(cfg, make_zero_field(), GridSpec{10.0, 40 * k, 16 * k, {}}));
  const auto ex = refine(rs);
  // Continuum edge plus the longitudinal box energy (pi / 2L)^2.
  const double target = kPi * kPi + std::pow(kPi / 20.0, 2);
  EXPECT_LE(std::abs(ex.energy - target), std::max(ex.error_bar, 1e-5));
}

TEST(Export, RoundTrip) {
  const StripConfig cfg(1.5);
  const auto r = lowest_mode(cfg, make_slab(0.1, 0.5), GridSpec{9.0, 60, 16, {}});
  std::stringstream ss;
  write_eigenvector(ss, r);
  const auto back = read_eigenvector(ss);
  EXPECT_EQ(back.b, 1.5);
  EXPECT_EQ(back.grid.L, 9.0);
  EXPECT_EQ(back.grid.nx, 60);
  EXPECT_EQ(back.grid.ny, 16);
  EXPECT_EQ(back.e_min, r.e_min);
  ASSERT_EQ(back.vector.size(), r.vector.size());
  for (std::size_t i = 0; i < r.vector.size(); ++i) EXPECT_EQ(back.vector[i], r.vector[i]);
}

TEST(Export, HeaderIsSelfDescribing) {
  const auto r = lowest_mode(StripConfig(1.0), make_zero_field(), GridSpec{5.0, 32, 16, {}});
  std::stringstream ss;
  write_eigenvector(ss, r);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line.rfind("# wavebound eigenvector", 0), 0u);
  std::getline(ss, line);
  EXPECT_EQ(line, "b 1");
  std::getline(ss, line);
  EXPECT_EQ(line, "L 5");
  std::getline(ss, line);
  EXPECT_EQ(line, "nx 32");
  std::getline(ss, line);
  EXPECT_EQ(line, "ny 16");
}

TEST(Export, TruncatedFileRejected) {
  std::stringstream ss("b 1\nL 5\nnx 32\nny 16\ne_min 9\n0 0 0\n");
  EXPECT_THROW(read_eigenvector(ss), std::runtime_error);
}
