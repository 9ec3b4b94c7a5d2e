#pragma once

// Adaptive Gauss-Kronrod integration over the strip cross-section and over
// pairs of strip points.
//
// The 1D core is a 21-point Kronrod / 10-point Gauss panel rule with
// bisection of the worst panel. Multi-dimensional integrals are iterated 1D
// integrals; every nesting level gets a tightened share of the tolerance and
// inner error estimates are folded into the outer one conservatively
// (window length times the largest inner estimate).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "wavebound/domain.hpp"

namespace wavebound {

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-14;
  int max_subdivisions = 2000;
  /// x-coordinates where the integrand is known to be non-smooth.
  std::vector<double> split_points_x{};
  /// y-coordinates where the integrand is known to be non-smooth.
  std::vector<double> split_points_y{};

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw DomainError("quadrature tolerances must be positive");
    if (max_subdivisions < 1) throw DomainError("max_subdivisions must be at least 1");
  }
};

struct QuadResult {
  double value = 0.0;
  double err_estimate = 0.0;
  long n_evals = 0;
  bool converged = true;
};

namespace detail {

// QUADPACK qk21 abscissae and weights.
inline constexpr std::array<double, 11> gk21_x{
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720, 0.0};
inline constexpr std::array<double, 11> gk21_wk{
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525496024, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> gk21_wg{
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

inline constexpr double epmach = std::numeric_limits<double>::epsilon();
inline constexpr double uflow = std::numeric_limits<double>::min();

inline double qk_error(double resk, double resg, double resabs, double resasc) {
  double err = std::abs((resk - resg));
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > uflow / (50.0 * epmach)) err = std::max(epmach * 50.0 * resabs, err);
  return err;
}

struct Panel {
  double a;
  double b;
  double value;
  double err;
};

template <class F>
Panel gk21(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = gk21_wk[10] * fc;
  double resg = 0.0;
  double resabs = std::abs(resk);
  std::array<double, 10> f1{};
  std::array<double, 10> f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = h * gk21_x[j];
    f1[j] = f(c - dx);
    f2[j] = f(c + dx);
    resk += gk21_wk[j] * (f1[j] + f2[j]);
    resabs += gk21_wk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) resg += gk21_wg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * resk;
  double resasc = gk21_wk[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j)
    resasc += gk21_wk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  const double hh = std::abs(h);
  return Panel{a, b, resk * h, qk_error(resk * h, resg * h, resabs * hh, resasc * hh)};
}

inline std::vector<double> panel_edges(double a, double b, std::span<const double> breaks) {
  std::vector<double> edges{a};
  for (double x : breaks)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

}  // namespace detail

/// Adaptive 1D integral of f over [a, b] with forced panel edges at `breaks`.
/// Never reports convergence unless the error estimate meets the tolerance.
template <class F>
QuadResult integrate_1d(const F& f, double a, double b, std::span<const double> breaks,
                        double rel_tol, double abs_tol, int max_subdivisions) {
  QuadResult out;
  if (a == b) return out;
  const bool flip = b < a;
  if (flip) std::swap(a, b);

  long evals = 0;
  std::vector<detail::Panel> panels;
  const auto edges = detail::panel_edges(a, b, breaks);
  for (std::size_t i = 1; i < edges.size(); ++i) {
    panels.push_back(detail::gk21(f, edges[i - 1], edges[i]));
    evals += 21;
  }

  auto totals = [&panels] {
    double v = 0.0;
    double e = 0.0;
    for (const auto& p : panels) {
      v += p.value;
      e += p.err;
    }
    return std::pair{v, e};
  };

  auto [value, err] = totals();
  bool converged = err <= std::max(abs_tol, rel_tol * std::abs(value));
  while (!converged) {
    if (static_cast<int>(panels.size()) >= max_subdivisions) break;
    // Worst panel; ties resolve to the leftmost, keeping the refinement order deterministic.
    auto worst = std::max_element(panels.begin(), panels.end(), [](const auto& l, const auto& r) {
      return l.err < r.err || (l.err == r.err && l.a > r.a);
    });
    const double mid = 0.5 * (worst->a + worst->b);
    if (!(mid > worst->a && mid < worst->b)) break;
    const detail::Panel left = detail::gk21(f, worst->a, mid);
    const detail::Panel right = detail::gk21(f, mid, worst->b);
    evals += 42;
    *worst = left;
    panels.push_back(right);
    std::tie(value, err) = totals();
    converged = err <= std::max(abs_tol, rel_tol * std::abs(value));
  }

  // Final sum in position order so the result does not depend on refinement history.
  std::sort(panels.begin(), panels.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  std::tie(value, err) = totals();
  out.value = flip ? -value : value;
  out.err_estimate = err;
  out.n_evals = evals;
  out.converged = converged;
  return out;
}

template <class F>
QuadResult integrate_1d(const F& f, double a, double b, const QuadratureSpec& spec) {
  return integrate_1d(f, a, b, spec.split_points_x, spec.rel_tol, spec.abs_tol,
                      spec.max_subdivisions);
}

struct VectorQuadResult {
  std::vector<double> value;
  double err_estimate = 0.0;  // max over components
  long n_evals = 0;
  bool converged = true;
};

/// Adaptive 1D integral of a vector-valued integrand f(x, out) with `dim`
/// components. Error control uses the largest component error against
/// max(abs_tol, rel_tol * max_k |value_k|).
template <class F>
VectorQuadResult integrate_1d_vector(const F& f, std::size_t dim, double a, double b,
                                     std::span<const double> breaks, double rel_tol,
                                     double abs_tol, int max_subdivisions) {
  VectorQuadResult out;
  out.value.assign(dim, 0.0);
  if (a == b || dim == 0) return out;
  const bool flip = b < a;
  if (flip) std::swap(a, b);

  struct VPanel {
    double a;
    double b;
    std::vector<double> value;
    std::vector<double> err;
  };

  std::vector<double> samples(21 * dim);
  long evals = 0;
  auto rule = [&](double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    // samples layout: [0] = center, [1 + 2j] = c - dx_j, [2 + 2j] = c + dx_j
    f(c, std::span<double>(samples.data(), dim));
    for (int j = 0; j < 10; ++j) {
      const double dx = h * detail::gk21_x[j];
      f(c - dx, std::span<double>(samples.data() + (1 + 2 * j) * dim, dim));
      f(c + dx, std::span<double>(samples.data() + (2 + 2 * j) * dim, dim));
    }
    evals += 21;
    VPanel p{lo, hi, std::vector<double>(dim), std::vector<double>(dim)};
    for (std::size_t k = 0; k < dim; ++k) {
      const double fc = samples[k];
      double resk = detail::gk21_wk[10] * fc;
      double resg = 0.0;
      double resabs = std::abs(resk);
      for (int j = 0; j < 10; ++j) {
        const double f1 = samples[(1 + 2 * j) * dim + k];
        const double f2 = samples[(2 + 2 * j) * dim + k];
        resk += detail::gk21_wk[j] * (f1 + f2);
        resabs += detail::gk21_wk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += detail::gk21_wg[j / 2] * (f1 + f2);
      }
      const double mean = 0.5 * resk;
      double resasc = detail::gk21_wk[10] * std::abs(fc - mean);
      for (int j = 0; j < 10; ++j)
        resasc += detail::gk21_wk[j] * (std::abs(samples[(1 + 2 * j) * dim + k] - mean) +
                                        std::abs(samples[(2 + 2 * j) * dim + k] - mean));
      const double hh = std::abs(h);
      p.value[k] = resk * h;
      p.err[k] = detail::qk_error(resk * h, resg * h, resabs * hh, resasc * hh);
    }
    return p;
  };

  std::vector<VPanel> panels;
  const auto edges = detail::panel_edges(a, b, breaks);
  for (std::size_t i = 1; i < edges.size(); ++i) panels.push_back(rule(edges[i - 1], edges[i]));

  std::vector<double> total(dim);
  std::vector<double> total_err(dim);
  auto accumulate = [&] {
    std::fill(total.begin(), total.end(), 0.0);
    std::fill(total_err.begin(), total_err.end(), 0.0);
    for (const auto& p : panels)
      for (std::size_t k = 0; k < dim; ++k) {
        total[k] += p.value[k];
        total_err[k] += p.err[k];
      }
    double vmax = 0.0;
    double emax = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      vmax = std::max(vmax, std::abs(total[k]));
      emax = std::max(emax, total_err[k]);
    }
    return std::pair{vmax, emax};
  };
  auto panel_err = [](const VPanel& p) { return *std::max_element(p.err.begin(), p.err.end()); };

  auto [vmax, emax] = accumulate();
  bool converged = emax <= std::max(abs_tol, rel_tol * vmax);
  while (!converged && static_cast<int>(panels.size()) < max_subdivisions) {
    auto worst = std::max_element(panels.begin(), panels.end(), [&](const auto& l, const auto& r) {
      const double el = panel_err(l);
      const double er = panel_err(r);
      return el < er || (el == er && l.a > r.a);
    });
    const double lo = worst->a;
    const double hi = worst->b;
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    *worst = rule(lo, mid);
    panels.push_back(rule(mid, hi));
    std::tie(vmax, emax) = accumulate();
    converged = emax <= std::max(abs_tol, rel_tol * vmax);
  }

  std::sort(panels.begin(), panels.end(), [](const auto& l, const auto& r) { return l.a < r.a; });
  std::tie(vmax, emax) = accumulate();
  out.value = total;
  if (flip)
    for (auto& v : out.value) v = -v;
  out.err_estimate = emax;
  out.n_evals = evals;
  out.converged = converged;
  return out;
}

namespace detail {

// Share of the tolerance handed to each nested level.
inline constexpr double nested_tol_factor = 0.2;

/// Tracks the worst inner result seen by an outer integrand.
struct InnerLedger {
  double max_err = 0.0;
  long evals = 0;
  bool converged = true;

  void record(const QuadResult& r) {
    max_err = std::max(max_err, r.err_estimate);
    evals += r.n_evals;
    converged = converged && r.converged;
  }
};

inline QuadResult fold_inner(QuadResult outer, const InnerLedger& inner, double outer_length) {
  outer.err_estimate += std::abs(outer_length) * inner.max_err;
  outer.n_evals = inner.evals;
  outer.converged = outer.converged && inner.converged;
  return outer;
}

}  // namespace detail

/// Integral of f(x, y) over window_x x [-b/2, b/2].
template <class F>
QuadResult integrate_strip(const F& f, const StripConfig& cfg, Interval window_x,
                           const QuadratureSpec& spec) {
  spec.validate();
  if (window_x.length() == 0.0) return {};
  const double hb = cfg.half_width();
  const double len = std::abs(window_x.length());
  const double inner_rel = spec.rel_tol * detail::nested_tol_factor;
  const double inner_abs = spec.abs_tol * detail::nested_tol_factor / len;

  detail::InnerLedger ledger;
  auto slice = [&](double x) {
    const QuadResult r = integrate_1d([&](double y) { return f(x, y); }, -hb, hb,
                                      spec.split_points_y, inner_rel, inner_abs,
                                      spec.max_subdivisions);
    ledger.record(r);
    return r.value;
  };
  const QuadResult outer = integrate_1d(slice, window_x.lo, window_x.hi, spec.split_points_x,
                                        spec.rel_tol * (1.0 - detail::nested_tol_factor),
                                        spec.abs_tol * (1.0 - detail::nested_tol_factor),
                                        spec.max_subdivisions);
  return detail::fold_inner(outer, ledger, len);
}

struct PairOptions {
  /// Force panel edges at y2 = y1 in the innermost pass (point singularities).
  bool split_diagonal_y = false;
};

/// Integral of k(x1, y1, x2, y2) over (window1 x strip) x (window2 x strip).
/// The inner x2 pass always has a forced panel edge at x2 = x1.
template <class K>
QuadResult integrate_pair(const K& kernel, const StripConfig& cfg, Interval window1,
                          Interval window2, const QuadratureSpec& spec, PairOptions opts = {}) {
  spec.validate();
  if (window1.length() == 0.0 || window2.length() == 0.0) return {};
  const double hb = cfg.half_width();
  const double len1 = std::abs(window1.length());
  const double len2 = std::abs(window2.length());
  const double f = detail::nested_tol_factor;

  detail::InnerLedger x2_ledger;
  auto inner_x1y1 = [&](double x1, double y1) {
    std::vector<double> breaks2 = spec.split_points_x;
    breaks2.push_back(x1);
    std::vector<double> breaks_y = spec.split_points_y;
    if (opts.split_diagonal_y) breaks_y.push_back(y1);
    detail::InnerLedger y2_ledger;
    auto over_y2 = [&](double x2) {
      const QuadResult r = integrate_1d([&](double y2) { return kernel(x1, y1, x2, y2); }, -hb, hb,
                                        breaks_y, spec.rel_tol * f * f * f,
                                        spec.abs_tol * f * f * f / (len1 * cfg.width() * len2),
                                        spec.max_subdivisions);
      y2_ledger.record(r);
      return r.value;
    };
    QuadResult r = integrate_1d(over_y2, window2.lo, window2.hi, breaks2, spec.rel_tol * f * f,
                                spec.abs_tol * f * f / (len1 * cfg.width()),
                                spec.max_subdivisions);
    r = detail::fold_inner(r, y2_ledger, len2);
    x2_ledger.record(r);
    return r.value;
  };

  QuadratureSpec outer = spec;
  outer.rel_tol = spec.rel_tol * (1.0 - f);
  outer.abs_tol = spec.abs_tol * (1.0 - f);
  // The outer 2D pass: ledger of the x2 level is folded over the outer area.
  QuadResult r = integrate_strip(inner_x1y1, cfg, window1, outer);
  const long outer_evals = r.n_evals;
  r = detail::fold_inner(r, x2_ledger, len1 * cfg.width());
  r.n_evals = outer_evals + x2_ledger.evals;
  return r;
}

}  // namespace wavebound
