#pragma once

// Weak-field variational bound with the trial state
//   sqrt(a) exp(-a |x|) sqrt(2/b) sin(pi (y + b/2) / b).

#include <cmath>
#include <limits>

#include "wavebound/domain.hpp"
#include "wavebound/perturbation.hpp"
#include "wavebound/quadrature.hpp"

namespace wavebound {

struct VariationalResult {
  double a = 0.0;  // decay rate, 1/length
  double w = 0.0;  // energy bound
  bool bound_exists = false;
  double m1 = 0.0;
  QuadResult moment;
  /// max |sigma| above the weak-field regime this closed form assumes.
  bool strong_field_warning = false;
  /// Full Rayleigh quotient of the trial state at this a; NaN when not evaluated.
  double quotient = std::numeric_limits<double>::quiet_NaN();
  double quotient_err = std::numeric_limits<double>::quiet_NaN();
};

/// Optimal decay rate in the weak-field limit, a = pi^2 M1 / b^3.
inline double variational_rate(const StripConfig& cfg, double m1) {
  const double b = cfg.width();
  return pi * pi * m1 / (b * b * b);
}

inline VariationalResult variational_from_moment(const StripConfig& cfg, const QuadResult& m1) {
  VariationalResult out;
  out.moment = m1;
  out.m1 = m1.value;
  out.a = variational_rate(cfg, m1.value);
  out.w = cfg.threshold() + e2_from_moment(cfg, m1.value);
  out.bound_exists = out.a > 0.0;
  return out;
}

inline constexpr double weak_field_limit = 0.3;

/// Rayleigh quotient of exp(-a|x|) cos(pi y / b):
///   (a^2 + pi^2/b^2) / (1 + (2a/b) int sigma exp(-2a|x|) cos^2(pi y/b)).
/// An upper bound on the ground-state energy for any a > 0.
inline QuadResult rayleigh_quotient(const StripConfig& cfg, const DensityField& field, double a,
                                    const QuadratureSpec& spec = default_moment_spec(),
                                    double eta = 1.0) {
  if (!(a > 0.0)) throw DomainError("Rayleigh quotient needs a positive decay rate");
  const double b = cfg.width();
  QuadResult j;
  if (!field.is_zero())
    j = integrate_strip(
        [&](double x, double y) {
          const double c = cfg.ground_mode(y);
          return field(x, y) * std::exp(-2.0 * a * std::abs(x)) * c * c;
        },
        cfg, field.support_x(), detail::with_field_breaks(spec, field));
  const double denom = 1.0 + 2.0 * a / b * eta * j.value;
  QuadResult q = j;
  q.value = (a * a + cfg.threshold()) / denom;
  q.err_estimate = q.value * (2.0 * a / b) / denom * std::abs(eta) * j.err_estimate;
  return q;
}

/// eta scales the field, Sigma = 1 + eta sigma.
inline VariationalResult variational_estimate(const StripConfig& cfg, const DensityField& field,
                                              const QuadratureSpec& spec = default_moment_spec(),
                                              double eta = 1.0) {
  QuadResult m1 = moment_m1(cfg, field, spec);
  m1.value *= eta;
  m1.err_estimate *= std::abs(eta);
  VariationalResult out = variational_from_moment(cfg, m1);
  // Coarse scan for the warning only.
  const Interval s = field.support_x();
  double peak = 0.0;
  for (int i = 0; i <= 64 && !field.is_zero(); ++i)
    for (int j = 0; j <= 16; ++j) {
      const double x = s.lo + s.length() * i / 64.0;
      const double y = -cfg.half_width() + cfg.width() * j / 16.0;
      peak = std::max(peak, std::abs(eta * field(x, y)));
    }
  out.strong_field_warning = peak > weak_field_limit;
  if (out.bound_exists) {
    const QuadResult q = rayleigh_quotient(cfg, field, out.a, spec, eta);
    out.quotient = q.value;
    out.quotient_err = q.err_estimate;
  }
  return out;
}

}  // namespace wavebound
