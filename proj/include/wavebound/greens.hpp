#pragma once

// Transverse-excited part of the reduced resolvent at the continuum edge,
//
//   G2(x1, y1, x2, y2) = sum_{n>=2} exp(-kappa_n |x1 - x2|) / (pi k_n)
//                          * sin(n a1) sin(n a2),
//
// with k_n = sqrt(n^2 - 1), kappa_n = pi k_n / b and a = pi (y + b/2) / b.
// It is finite away from the coincidence point and has a logarithmic
// singularity there.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wavebound/domain.hpp"
#include "wavebound/special_functions.hpp"

namespace wavebound {

enum class GreensRegime { direct_sum, small_separation };

struct GreensEval {
  double value = 0.0;
  long n_terms_used = 0;
  double tail_bound = 0.0;
  GreensRegime regime = GreensRegime::direct_sum;
};

/// Raised when G2 is evaluated at (or numerically on) its singular point.
class GreensSingularity : public DomainError {
public:
  using DomainError::DomainError;
};

namespace detail {

inline double transverse_angle(double y, const StripConfig& cfg) {
  return pi * (y + cfg.half_width()) / cfg.width();
}

/// sin(n a) by the Chebyshev recurrence, reseeded periodically to bound drift.
class SineLadder {
public:
  explicit SineLadder(double a) : a_(a), two_cos_(2.0 * std::cos(a)) { reseed(1); }

  [[nodiscard]] double current() const { return cur_; }
  [[nodiscard]] long index() const { return n_; }

  void advance() {
    ++n_;
    if (n_ % 32 == 0) {
      reseed(n_);
      return;
    }
    const double next = two_cos_ * cur_ - prev_;
    prev_ = cur_;
    cur_ = next;
  }

private:
  void reseed(long n) {
    n_ = n;
    cur_ = std::sin(static_cast<double>(n) * a_);
    prev_ = std::sin(static_cast<double>(n - 1) * a_);
  }

  double a_;
  double two_cos_;
  long n_ = 1;
  double cur_ = 0.0;
  double prev_ = 0.0;
};

inline constexpr long max_green_terms = 50'000'000;

// Stopping rule shared by the mode sums; fixed_terms > 0 pins the count of modes n >= 2.
inline bool done(long n, double tail, double sum, double tol, long fixed_terms) {
  if (fixed_terms > 0) return n - 1 >= fixed_terms;
  return tail <= tol * std::max(1.0, std::abs(sum)) || n >= max_green_terms;
}

// exp(-k u)/k - exp(-n u)/n with k = sqrt(n^2 - 1), free of cancellation.
inline double mode_difference(long n, double u) {
  const double nn = static_cast<double>(n);
  const double k = std::sqrt(nn * nn - 1.0);
  const double gap = 1.0 / (nn + k);  // n - k
  return std::exp(-nn * u) * (std::expm1(gap * u) / k + gap / (nn * k));
}

// Out of line so every caller runs the same instruction sequence; inlined
// copies may fuse sin/cos differently and break bitwise swap symmetry.
[[gnu::noinline]] inline GreensEval g2_direct(double dx, double a1, double a2, const StripConfig& cfg, double tol,
                            long fixed_terms = 0) {
  const double u = pi * dx / cfg.width();
  SineLadder s1(a1);
  SineLadder s2(a2);
  GreensEval out;
  out.regime = GreensRegime::direct_sum;
  double sum = 0.0;
  const double geometric = 1.0 / (-std::expm1(-u));  // 1 / (1 - e^{-u})
  for (long n = 2;; ++n) {
    s1.advance();
    s2.advance();
    const double k = std::sqrt(static_cast<double>(n) * n - 1.0);
    sum += std::exp(-k * u) / (pi * k) * s1.current() * s2.current();
    // sum_{m>n} e^{-k_m u}/(pi k_m) <= e^{-n u} / (pi n (1 - e^{-u}))
    const double tail = std::exp(-static_cast<double>(n) * u) / (pi * n) * geometric;
    if (done(n, tail, sum, tol, fixed_terms)) {
      out.value = sum;
      out.n_terms_used = n - 1;
      out.tail_bound = tail;
      return out;
    }
  }
}

// Bound on sum_{n>N} |mode_difference(n, u)| / pi.
inline double difference_tail(long N, double u) {
  const double m = static_cast<double>(N);
  const double decay = std::exp(-m * u);
  const double one_minus = -std::expm1(-u);
  const double sq = one_minus > 0.0 ? std::min(1.0 / (m * m) + 1.0 / m, decay / (m * m * one_minus))
                                    : 1.0 / (m * m) + 1.0 / m;
  const double cube = one_minus > 0.0
                          ? std::min(1.0 / (m * m * m) + 0.5 / (m * m), decay / (m * m * m * one_minus))
                          : 1.0 / (m * m * m) + 0.5 / (m * m);
  return (u * sq + cube) / pi;
}

[[gnu::noinline]] inline GreensEval g2_small_separation(double dx, double a1, double a2, const StripConfig& cfg,
                                      double tol, long fixed_terms = 0) {
  const double u = pi * dx / cfg.width();
  const double q = std::exp(-u);
  const double one_minus_q = -std::expm1(-u);
  // (1 - 2 q cos D + q^2) = (1 - q)^2 + 4 q sin^2(D / 2)
  auto image = [&](double d) {
    const double s = std::sin(0.5 * d);
    return one_minus_q * one_minus_q + 4.0 * q * s * s;
  };
  const double near = image(a1 - a2);
  const double far = image(a1 + a2);
  if (!(near > 0.0)) throw GreensSingularity("G2 evaluated at the coincidence point");
  // sum_{n>=1} q^n/n sin(n a1) sin(n a2) = (1/4) log(far / near)
  double sum = (0.25 * std::log(far / near) - q * std::sin(a1) * std::sin(a2)) / pi;

  SineLadder s1(a1);
  SineLadder s2(a2);
  GreensEval out;
  out.regime = GreensRegime::small_separation;
  for (long n = 2;; ++n) {
    s1.advance();
    s2.advance();
    sum += mode_difference(n, u) / pi * s1.current() * s2.current();
    const double tail = difference_tail(n, u);
    if (done(n, tail, sum, tol, fixed_terms)) {
      out.value = sum;
      out.n_terms_used = n - 1;
      out.tail_bound = tail;
      return out;
    }
  }
}

}  // namespace detail

/// Separation (in units of b) below which the image-sum regime is preferred.
inline constexpr double g2_small_separation_limit = 0.05;

/// G2 at two strip points, truncated so the rigorous tail majorant is below
/// tol * max(1, |value|).
inline GreensEval g2_zero(double x1, double y1, double x2, double y2, const StripConfig& cfg,
                          double tol, bool force_direct = false) {
  if (!(tol > 0.0)) throw DomainError("greens tolerance must be positive");
  const double hb = cfg.half_width();
  if (std::abs(y1) > hb || std::abs(y2) > hb)
    throw DomainError("greens evaluation point outside the strip");
  const double dx = std::abs(x1 - x2);
  // Ordered angles make the result bitwise symmetric under swapping the points.
  const double a1 = detail::transverse_angle(std::min(y1, y2), cfg);
  const double a2 = detail::transverse_angle(std::max(y1, y2), cfg);
  if (std::abs(y1) == hb || std::abs(y2) == hb) return GreensEval{};  // Dirichlet wall

  if (dx == 0.0) {
    if (force_direct) throw GreensSingularity("direct mode sum diverges at zero separation");
    return detail::g2_small_separation(dx, a1, a2, cfg, tol);
  }
  const double direct_terms = std::log(1.0 / tol) / (pi * dx / cfg.width());
  const double image_terms = 1.0 / std::sqrt(2.0 * pi * tol);
  if (force_direct || dx >= g2_small_separation_limit * cfg.width() || direct_terms < image_terms)
    return detail::g2_direct(dx, a1, a2, cfg, tol);
  return detail::g2_small_separation(dx, a1, a2, cfg, tol);
}

/// G2 truncated after exactly `n_terms` modes (n = 2 .. n_terms + 1) in the
/// given regime; tail_bound is the majorant of everything dropped.
inline GreensEval g2_zero_truncated(double x1, double y1, double x2, double y2,
                                    const StripConfig& cfg, long n_terms, GreensRegime regime) {
  if (n_terms < 1) throw DomainError("need at least one mode");
  const double hb = cfg.half_width();
  if (std::abs(y1) > hb || std::abs(y2) > hb)
    throw DomainError("greens evaluation point outside the strip");
  const double dx = std::abs(x1 - x2);
  // Ordered angles make the result bitwise symmetric under swapping the points.
  const double a1 = detail::transverse_angle(std::min(y1, y2), cfg);
  const double a2 = detail::transverse_angle(std::max(y1, y2), cfg);
  if (regime == GreensRegime::direct_sum) {
    if (dx == 0.0) throw GreensSingularity("direct mode sum diverges at zero separation");
    return detail::g2_direct(dx, a1, a2, cfg, 1.0, n_terms);
  }
  return detail::g2_small_separation(dx, a1, a2, cfg, 1.0, n_terms);
}

/// The y-independent mode sum  sum_{n>=2} exp(-pi k_n dx / b) / (pi k_n).
inline GreensEval g2_mode_sum(double dx, const StripConfig& cfg, double tol) {
  if (!(dx > 0.0)) throw DomainError("mode sum needs a positive separation");
  const double u = pi * dx / cfg.width();
  GreensEval out;
  const double geometric = 1.0 / (-std::expm1(-u));
  double sum = 0.0;
  for (long n = 2;; ++n) {
    const double k = std::sqrt(static_cast<double>(n) * n - 1.0);
    sum += std::exp(-k * u) / (pi * k);
    const double tail = std::exp(-static_cast<double>(n) * u) / (pi * n) * geometric;
    if (tail <= tol * std::max(1.0, std::abs(sum)) || n >= detail::max_green_terms) {
      out.value = sum;
      out.n_terms_used = n - 1;
      out.tail_bound = tail;
      return out;
    }
  }
}

/// Validity range of the small-separation expansion, in units of b.
inline constexpr double g2_smallsep_validity = 1e-2;

/// Small-separation expansion of g2_mode_sum:
///   -log(pi dx/b)/pi - 1/pi + 3 dx/(2b) + (1/pi) sum_{k=1}^{order} C(2k,k)/4^k (zeta(2k+1) - 1).
/// order = 2 keeps the zeta(3), zeta(5) constants.
inline double g2_series_smallsep(double dx, const StripConfig& cfg, int order) {
  if (!(dx > 0.0)) throw DomainError("small-separation series needs dx > 0");
  if (order < 0) throw DomainError("series order must be non-negative");
  const double r = dx / cfg.width();
  double constant = 0.0;
  double binom = 1.0;  // C(2k, k) / 4^k
  for (int k = 1; k <= order; ++k) {
    binom *= (2.0 * k - 1.0) / (2.0 * k);
    constant += binom * (special::zeta_int(2 * k + 1) - 1.0);
  }
  return -std::log(pi * r) / pi - 1.0 / pi + 1.5 * r + constant / pi;
}

/// Polylog resummation of g2_mode_sum through the 1/n^3 terms of the
/// large-n expansion of exp(-pi k_n dx/b)/(pi k_n).
inline double g2_polylog_resummed(double dx, const StripConfig& cfg) {
  if (!(dx > 0.0)) throw DomainError("polylog form needs dx > 0");
  const double b = cfg.width();
  const double q = std::exp(-pi * dx / b);
  const double leading = -(q + std::log(-std::expm1(-pi * dx / b))) / pi;
  const double next = (-q * (b + pi * dx) + pi * dx * special::polylog(2, q) +
                       b * special::polylog(3, q)) /
                      (2.0 * pi * b);
  return leading + next;
}

}  // namespace wavebound
