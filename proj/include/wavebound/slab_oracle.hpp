#pragma once

// Exactly solvable slab: Sigma = 1 + sigma0 for |x| < delta/2, else 1.
//
// Even localized ground state
//   a1 e^{p1 x}            x < -delta/2
//   a2 cos(p2 x)           |x| < delta/2
//   a3 e^{-p1 x}           x > delta/2
// times the ground transverse mode, with p1 = p2 tan(delta p2 / 2) and
//   pi^2/b^2 - p2^2 tan^2(delta p2/2) = (pi^2/b^2 + p2^2) / (1 + sigma0).

#include <array>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavebound/domain.hpp"

namespace wavebound {

/// No localized even state exists in the requested regime.
class NoSlabBoundState : public DomainError {
public:
  using DomainError::DomainError;
};

/// The transcendental equation could not be bracketed or solved.
class SlabRootError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SlabSolution {
  double sigma0 = 0.0;
  double delta = 0.0;
  double p2 = 0.0;  // interior wavenumber
  double p1 = 0.0;  // exterior decay rate
  std::array<double, 3> amplitudes{};
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

namespace detail {

inline double slab_residual(double p2, double sigma0, double delta, double e0) {
  const double t = std::tan(0.5 * delta * p2);
  return e0 - p2 * p2 * t * t - (e0 + p2 * p2) / (1.0 + sigma0);
}

}  // namespace detail

/// Root of the matching condition on the first branch 0 < delta p2 / 2 < pi / 2.
/// Amplitudes are normalized to a2 = 1 unless l2_normalize is set.
inline SlabSolution solve_slab(const StripConfig& cfg, const SlabProfile& slab, double tol = 1e-12,
                               bool l2_normalize = false) {
  if (!(tol > 0.0)) throw DomainError("slab residual tolerance must be positive");
  if (!(slab.sigma0 > 0.0))
    throw NoSlabBoundState("no slab bound state in this regime: sigma0 = " +
                           std::to_string(slab.sigma0) + " (need a denser slab, sigma0 > 0)");
  const double b = cfg.width();
  const double e0 = cfg.threshold();
  const double s = slab.sigma0;
  const double d = slab.delta;

  // At p2 = pi sqrt(sigma0) / b the energy reaches threshold (p1 = 0); beyond
  // pi / delta the tangent leaves the first branch.
  const double lo = 1e-300;
  const double hi = std::min(pi * std::sqrt(s) / b, pi / d * (1.0 - 1e-9));
  auto f = [&](double p) { return detail::slab_residual(p, s, d, e0); };
  const double flo = f(lo);
  const double fhi = f(hi);
  if (!(flo > 0.0 && fhi < 0.0)) {
    std::ostringstream msg;
    msg << "slab root not bracketed on [" << lo << ", " << hi << "]: f = " << flo << ", " << fhi;
    throw SlabRootError(msg.str());
  }

  std::uintmax_t iters = 200;
  const auto [r_lo, r_hi] = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
  // Keep whichever end has the smaller residual.
  const double p2 = std::abs(f(r_lo)) <= std::abs(f(r_hi)) ? r_lo : r_hi;

  SlabSolution out;
  out.sigma0 = s;
  out.delta = d;
  out.p2 = p2;
  const double half_phase = 0.5 * d * p2;
  out.p1 = p2 * std::tan(half_phase);
  out.energy = e0 - out.p1 * out.p1;
  out.residual = std::abs(f(p2));
  out.iterations = static_cast<int>(iters);
  const double edge = std::cos(half_phase) * std::exp(half_phase * std::tan(half_phase));
  out.amplitudes = {edge, 1.0, edge};
  if (l2_normalize) {
    // int |psi|^2 dx with the transverse mode already unit-normalized
    const double inside = 0.5 * d + std::sin(d * p2) / (2.0 * p2);
    const double outside = edge * edge * std::exp(-out.p1 * d) / out.p1;
    const double scale = 1.0 / std::sqrt(inside + outside);
    for (auto& a : out.amplitudes) a *= scale;
  }
  if (out.residual > tol * std::max(1.0, e0)) {
    std::ostringstream msg;
    msg << "slab root residual " << out.residual << " exceeds tolerance " << tol;
    throw SlabRootError(msg.str());
  }
  return out;
}

/// Longitudinal profile of the slab eigenfunction at x.
inline double slab_profile_x(const SlabSolution& sol, double x) {
  const double h = 0.5 * sol.delta;
  if (x < -h) return sol.amplitudes[0] * std::exp(sol.p1 * x);
  if (x > h) return sol.amplitudes[2] * std::exp(-sol.p1 * x);
  return sol.amplitudes[1] * std::cos(sol.p2 * x);
}

/// Small-sigma0 series coefficients, index k multiplies sigma0^k (k = 0..order).
struct SlabSeries {
  std::vector<double> p2sq;
  std::vector<double> p1;
  std::vector<double> energy;

  [[nodiscard]] static double evaluate(const std::vector<double>& c, double sigma0) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * sigma0 + *it;
    return acc;
  }
};

inline SlabSeries slab_series(const StripConfig& cfg, double delta, int order) {
  if (order < 2 || order > 5) throw DomainError("slab series order must be within 2..5");
  if (!(delta > 0.0)) throw DomainError("slab width must be positive");
  const double b = cfg.width();
  const double d = delta;
  const double p2 = pi * pi;
  const double p4 = p2 * p2;
  const double p6 = p4 * p2;
  const double p8 = p4 * p4;
  const double b2 = b * b;
  const double b4 = b2 * b2;
  const double b6 = b4 * b2;
  const double b8 = b4 * b4;
  const double b10 = b8 * b2;
  const double d2 = d * d;
  const double d3 = d2 * d;
  const double d4 = d2 * d2;
  const double d5 = d4 * d;
  const double d6 = d4 * d2;
  const double d7 = d6 * d;

  SlabSeries s;
  s.p2sq = {0.0,
            p2 / b2,
            -p4 * d2 / (4.0 * b4),
            p4 * d2 * (p2 * d2 - 3.0 * b2) / (12.0 * b6),
            (150.0 * p6 * b2 * d4 - 23.0 * p8 * d6) / (720.0 * b8),
            p6 * d4 * (630.0 * b4 - 686.0 * p2 * b2 * d2 + 67.0 * p4 * d4) / (5040.0 * b10)};
  s.p1 = {0.0,
          p2 * d / (2.0 * b2),
          -p4 * d3 / (12.0 * b4),
          (p6 * d5 - 5.0 * p4 * b2 * d3) / (40.0 * b6),
          (210.0 * p6 * b2 * d5 - 23.0 * p8 * d7) / (2520.0 * b8),
          p6 * d5 * (1134.0 * b4 - 882.0 * p2 * b2 * d2 + 67.0 * p4 * d4) / (18144.0 * b10)};
  s.energy = {p2 / b2,
              0.0,
              -p4 * d2 / (4.0 * b4),
              p6 * d4 / (12.0 * b6),
              (90.0 * p6 * b2 * d4 - 23.0 * p8 * d6) / (720.0 * b8),
              p8 * d6 * (67.0 * p2 * d2 - 525.0 * b2) / (5040.0 * b10)};
  s.p2sq.resize(order + 1);
  s.p1.resize(order + 1);
  s.energy.resize(order + 1);
  return s;
}

}  // namespace wavebound
