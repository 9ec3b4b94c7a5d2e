#pragma once

// Perturbative ground-state energy of the heterogeneous strip, in the limit
// where the infrared regulator has been removed:
//
//   E = pi^2/b^2 + eta^2 E2 + eta^3 E3,
//   E1 = 0,
//   E2 = -(pi^4/b^6) M1^2,           M1 = int sigma cos^2(pi y/b),
//   E3 = (2 pi^6/b^9) M1 [I_A - b I_B],
//   I_A = int int |x1 - x2| sigma1 sigma2 cos^2(pi y1/b) cos^2(pi y2/b),
//   I_B = int int cos(pi y1/b) cos(pi y2/b) sigma1 sigma2 G2(x1, y1, x2, y2).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "wavebound/domain.hpp"
#include "wavebound/greens.hpp"
#include "wavebound/quadrature.hpp"

namespace wavebound {

enum class Verdict { bound, unbound_at_this_order, undetermined };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::bound: return "bound";
    case Verdict::unbound_at_this_order: return "unbound at this order";
    case Verdict::undetermined: return "undetermined";
  }
  return "?";
}

struct PerturbativeEnergy {
  double e0 = 0.0;
  double m1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double eta = 1.0;
  double total = 0.0;
  struct Errors {
    double m1 = 0.0;
    double e2 = 0.0;
    double e3 = 0.0;
    double total = 0.0;
  } err_estimates;
  Verdict verdict = Verdict::unbound_at_this_order;
  bool converged = true;
  bool weak_coupling_warning = false;
};

/// Default tolerances: the moment is cheap and enters squared, the pair
/// integrals are the cost driver and already O(sigma^3).
inline QuadratureSpec default_moment_spec() { return QuadratureSpec{1e-8, 1e-15, 2000, {}, {}}; }
inline QuadratureSpec default_pair_spec() { return QuadratureSpec{1e-5, 1e-13, 400, {}, {}}; }
inline constexpr double default_greens_tol = 1e-10;

namespace detail {

inline QuadratureSpec with_field_breaks(QuadratureSpec spec, const DensityField& field) {
  const auto& br = field.breaks_x();
  spec.split_points_x.insert(spec.split_points_x.end(), br.begin(), br.end());
  return spec;
}

}  // namespace detail

/// E1 vanishes once the regulator is removed.
inline double first_order(const StripConfig&, const DensityField&) { return 0.0; }

/// M1 = int sigma(x, y) cos^2(pi y / b) over the strip.
inline QuadResult moment_m1(const StripConfig& cfg, const DensityField& field,
                            const QuadratureSpec& spec = default_moment_spec()) {
  if (field.is_zero()) return {};
  return integrate_strip(
      [&](double x, double y) {
        const double c = cfg.ground_mode(y);
        return field(x, y) * c * c;
      },
      cfg, field.support_x(), detail::with_field_breaks(spec, field));
}

/// -(pi^4 / b^6) m1^2. Shared by the second-order and variational routes.
inline double e2_from_moment(const StripConfig& cfg, double m1) {
  const double b = cfg.width();
  const double b3 = b * b * b;
  return -(pi * pi * pi * pi) / (b3 * b3) * (m1 * m1);
}

struct SecondOrder {
  double e2 = 0.0;
  QuadResult m1;
  double err_estimate = 0.0;
};

inline SecondOrder second_order(const StripConfig& cfg, const DensityField& field,
                                const QuadratureSpec& spec = default_moment_spec()) {
  SecondOrder out;
  out.m1 = moment_m1(cfg, field, spec);
  out.e2 = e2_from_moment(cfg, out.m1.value);
  const double b = cfg.width();
  out.err_estimate = std::pow(pi, 4) / std::pow(b, 6) *
                     (2.0 * std::abs(out.m1.value) + out.m1.err_estimate) * out.m1.err_estimate;
  return out;
}

/// y-projections of sigma onto the transverse modes:
///   c_n(x) = int sigma(x, y) sin(a) sin(n a) dy,  a = pi (y + b/2) / b,  n = 1..N.
/// Note sin(a) = cos(pi y / b), so c_1 is the moment density of M1.
class TransverseProjection {
public:
  TransverseProjection(const StripConfig& cfg, const DensityField& field, std::size_t modes,
                       std::vector<double> y_breaks, double rel_tol = 1e-10,
                       double abs_tol = 1e-16)
      : cfg_(cfg), field_(field), modes_(modes), y_breaks_(std::move(y_breaks)),
        rel_tol_(rel_tol), abs_tol_(abs_tol) {}

  [[nodiscard]] std::size_t modes() const { return modes_; }

  void operator()(double x, std::span<double> out) {
    const double hb = cfg_.half_width();
    const VectorQuadResult r = integrate_1d_vector(
        [&](double y, std::span<double> v) {
          const double s = field_(x, y);
          if (s == 0.0) {
            std::fill(v.begin(), v.end(), 0.0);
            return;
          }
          const double a = detail::transverse_angle(y, cfg_);
          const double s1 = std::sin(a);
          // sin(n a) by recurrence; modes here stay modest so drift is negligible.
          const double two_cos = 2.0 * std::cos(a);
          double prev = 0.0;
          double cur = s1;
          for (std::size_t n = 0; n < v.size(); ++n) {
            v[n] = s * s1 * cur;
            const double next = two_cos * cur - prev;
            prev = cur;
            cur = next;
          }
        },
        modes_, -hb, hb, y_breaks_, rel_tol_, abs_tol_, 4000);
    converged_ = converged_ && r.converged;
    max_err_ = std::max(max_err_, r.err_estimate);
    std::copy(r.value.begin(), r.value.end(), out.begin());
  }

  [[nodiscard]] bool converged() const { return converged_; }
  [[nodiscard]] double max_err() const { return max_err_; }

private:
  StripConfig cfg_;
  DensityField field_;
  std::size_t modes_;
  std::vector<double> y_breaks_;
  double rel_tol_;
  double abs_tol_;
  bool converged_ = true;
  double max_err_ = 0.0;
};

struct ThirdOrder {
  double e3 = 0.0;
  QuadResult m1;
  QuadResult i_a;
  QuadResult i_b;
  /// Transverse modes n = 2..modes_used + 1 kept in I_B.
  long modes_used = 0;
  /// Rigorous bound on the dropped modes' contribution to I_B.
  double mode_tail = 0.0;
  double err_estimate = 0.0;
  bool converged = true;
};

namespace detail {

inline double third_order_prefactor(const StripConfig& cfg) {
  const double b = cfg.width();
  return 2.0 * std::pow(pi, 6) / std::pow(b, 9);
}

inline QuadResult pair_term_a(const StripConfig& cfg, const DensityField& field,
                              const QuadratureSpec& spec) {
  return integrate_pair(
      [&](double x1, double y1, double x2, double y2) {
        const double s1 = field(x1, y1);
        if (s1 == 0.0) return 0.0;
        const double c1 = cfg.ground_mode(y1);
        const double c2 = cfg.ground_mode(y2);
        return std::abs(x1 - x2) * s1 * field(x2, y2) * c1 * c1 * c2 * c2;
      },
      cfg, field.support_x(), field.support_x(), with_field_breaks(spec, field));
}

struct ModeTruncation {
  std::size_t modes = 0;  // total projection size, n = 1..modes
  double tail = 0.0;
  bool within_budget = false;
};

// Smallest power-of-two projection size whose Parseval tail bound on
// sum_{n>N} |T_n| meets the budget, T_n <= 2 b ||c_n||^2 / (pi^2 (n^2 - 1)).
inline ModeTruncation choose_modes(const StripConfig& cfg, const DensityField& field,
                                   const QuadratureSpec& spec, double greens_tol) {
  const double b = cfg.width();
  const QuadratureSpec tight{1e-12, 1e-18, 4000, field.breaks_x(), spec.split_points_y};
  const QuadResult p = integrate_strip(
      [&](double x, double y) {
        const double s = field(x, y);
        const double c = cfg.ground_mode(y);
        return s * s * c * c;
      },
      cfg, field.support_x(), tight);
  const double parseval_total = 0.5 * b * p.value;  // sum_n ||c_n||^2
  const double budget = std::max(greens_tol * 2.0 * b / (pi * pi) * parseval_total, spec.abs_tol);

  ModeTruncation best;
  for (std::size_t modes = 16; modes <= 1024; modes *= 2) {
    TransverseProjection proj(cfg, field, modes, spec.split_points_y, 1e-12, 1e-18);
    std::vector<double> c(modes);
    const VectorQuadResult q = integrate_1d_vector(
        [&](double x, std::span<double> out) {
          proj(x, c);
          for (std::size_t n = 0; n < modes; ++n) out[n] = c[n] * c[n];
        },
        modes, field.support_x().lo, field.support_x().hi, field.breaks_x(), 1e-12, 1e-20, 4000);
    double captured = 0.0;
    for (double v : q.value) captured += v;
    const double slack = p.err_estimate * 0.5 * b + q.err_estimate * static_cast<double>(modes) +
                         (proj.max_err() * 2.0 * std::abs(field.support_x().length()));
    const double remaining = std::max(0.0, parseval_total - captured) + slack;
    const double n1 = static_cast<double>(modes + 1);
    best.modes = modes;
    best.tail = 2.0 * b / (pi * pi * (n1 * n1 - 1.0)) * remaining;
    best.within_budget = best.tail <= budget;
    if (best.within_budget) break;
  }
  return best;
}

}  // namespace detail

/// I_B by transverse-mode projection:
///   I_B = sum_{n>=2} 1/(pi k_n) int int c_n(x1) c_n(x2) exp(-kappa_n |x1 - x2|).
/// Returns the pair integral and fills the truncation record.
inline QuadResult pair_term_b(const StripConfig& cfg, const DensityField& field,
                              const QuadratureSpec& spec, double greens_tol,
                              detail::ModeTruncation* truncation = nullptr) {
  const detail::ModeTruncation trunc = detail::choose_modes(cfg, field, spec, greens_tol);
  if (truncation) *truncation = trunc;
  const std::size_t modes = trunc.modes;
  const double b = cfg.width();
  std::vector<double> kappa(modes);
  std::vector<double> weight(modes);
  for (std::size_t i = 1; i < modes; ++i) {
    const double n = static_cast<double>(i + 1);
    const double k = std::sqrt(n * n - 1.0);
    kappa[i] = pi * k / b;
    weight[i] = 1.0 / (pi * k);
  }

  const Interval w = field.support_x();
  const double len = std::abs(w.length());
  const double f = detail::nested_tol_factor;
  TransverseProjection outer_proj(cfg, field, modes, spec.split_points_y);
  TransverseProjection inner_proj(cfg, field, modes, spec.split_points_y);
  std::vector<double> c1(modes);
  std::vector<double> c2(modes);
  detail::InnerLedger ledger;

  auto integrand = [&](double x1) {
    outer_proj(x1, c1);
    std::vector<double> breaks = field.breaks_x();
    breaks.push_back(x1);
    const VectorQuadResult inner = integrate_1d_vector(
        [&](double x2, std::span<double> out) {
          inner_proj(x2, c2);
          const double dx = std::abs(x1 - x2);
          out[0] = 0.0;
          for (std::size_t i = 1; i < modes; ++i)
            out[i] = weight[i] * c2[i] * std::exp(-kappa[i] * dx);
        },
        modes, w.lo, w.hi, breaks, spec.rel_tol * f, spec.abs_tol * f / len,
        spec.max_subdivisions);
    double s = 0.0;
    double c1_abs = 0.0;
    for (std::size_t i = 1; i < modes; ++i) {
      s += c1[i] * inner.value[i];
      c1_abs += std::abs(c1[i]);
    }
    ledger.record(QuadResult{s, inner.err_estimate * c1_abs, inner.n_evals, inner.converged});
    return s;
  };

  QuadResult r = integrate_1d(integrand, w.lo, w.hi, field.breaks_x(), spec.rel_tol * (1.0 - f),
                              spec.abs_tol * (1.0 - f), spec.max_subdivisions);
  r = detail::fold_inner(r, ledger, len);
  r.err_estimate += trunc.tail;
  r.converged = r.converged && trunc.within_budget && outer_proj.converged() &&
                inner_proj.converged();
  return r;
}

/// I_B as a literal 4D integral of the G2 kernel. Slow; reference route only.
inline QuadResult pair_term_b_direct(const StripConfig& cfg, const DensityField& field,
                                     const QuadratureSpec& spec, double greens_tol) {
  bool singular = false;
  QuadResult r = integrate_pair(
      [&](double x1, double y1, double x2, double y2) {
        const double s1 = field(x1, y1);
        if (s1 == 0.0) return 0.0;
        const double s2 = field(x2, y2);
        if (s2 == 0.0) return 0.0;
        try {
          const GreensEval g = g2_zero(x1, y1, x2, y2, cfg, greens_tol);
          return cfg.ground_mode(y1) * cfg.ground_mode(y2) * s1 * s2 * g.value;
        } catch (const GreensSingularity&) {
          singular = true;
          return 0.0;
        }
      },
      cfg, field.support_x(), field.support_x(), detail::with_field_breaks(spec, field),
      PairOptions{true});
  r.converged = r.converged && !singular;
  return r;
}

namespace detail {

inline ThirdOrder assemble_third(const StripConfig& cfg, const QuadResult& m1, QuadResult i_a,
                                 QuadResult i_b) {
  ThirdOrder out;
  out.m1 = m1;
  out.i_a = i_a;
  out.i_b = i_b;
  const double b = cfg.width();
  const double pref = third_order_prefactor(cfg);
  const double bracket = i_a.value - b * i_b.value;
  out.e3 = pref * m1.value * bracket;
  out.err_estimate = pref * (std::abs(m1.value) * (i_a.err_estimate + b * i_b.err_estimate) +
                             std::abs(bracket) * m1.err_estimate);
  out.converged = m1.converged && i_a.converged && i_b.converged;
  return out;
}

}  // namespace detail

/// Third-order coefficient given a precomputed moment. The moment multiplies
/// both pair integrals, so m1 == 0 short-circuits them.
inline ThirdOrder third_order(const StripConfig& cfg, const DensityField& field,
                              const QuadResult& m1, const QuadratureSpec& spec = default_pair_spec(),
                              double greens_tol = default_greens_tol) {
  spec.validate();
  if (m1.value == 0.0 || field.is_zero()) {
    ThirdOrder out;
    out.m1 = m1;
    out.converged = m1.converged;
    return out;
  }
  detail::ModeTruncation trunc;
  QuadResult i_a = detail::pair_term_a(cfg, field, spec);
  QuadResult i_b = pair_term_b(cfg, field, spec, greens_tol, &trunc);
  ThirdOrder out = detail::assemble_third(cfg, m1, i_a, i_b);
  out.modes_used = static_cast<long>(trunc.modes) - 1;
  out.mode_tail = trunc.tail;
  return out;
}

inline ThirdOrder third_order(const StripConfig& cfg, const DensityField& field,
                              const QuadratureSpec& spec = default_pair_spec(),
                              double greens_tol = default_greens_tol) {
  return third_order(cfg, field, moment_m1(cfg, field), spec, greens_tol);
}

/// Same quantity with I_B integrated directly against g2_zero.
inline ThirdOrder third_order_direct(const StripConfig& cfg, const DensityField& field,
                                     const QuadratureSpec& spec, double greens_tol) {
  const QuadResult m1 = moment_m1(cfg, field);
  if (m1.value == 0.0 || field.is_zero()) {
    ThirdOrder out;
    out.m1 = m1;
    return out;
  }
  return detail::assemble_third(cfg, m1, detail::pair_term_a(cfg, field, spec),
                                pair_term_b_direct(cfg, field, spec, greens_tol));
}

/// |M1| below this fraction of the support area counts as vanishing.
inline constexpr double vanishing_moment_fraction = 1e-10;

inline PerturbativeEnergy assemble(const StripConfig& cfg, const DensityField& field, double eta,
                                   const QuadratureSpec& moment_spec = default_moment_spec(),
                                   const QuadratureSpec& pair_spec = default_pair_spec(),
                                   double greens_tol = default_greens_tol) {
  PerturbativeEnergy out;
  out.eta = eta;
  out.e0 = cfg.threshold();
  out.weak_coupling_warning = std::abs(eta) > 1.0;

  const SecondOrder second = second_order(cfg, field, moment_spec);
  const ThirdOrder third = third_order(cfg, field, second.m1, pair_spec, greens_tol);
  out.m1 = second.m1.value;
  out.e2 = second.e2;
  out.e3 = third.e3;
  out.err_estimates.m1 = second.m1.err_estimate;
  out.err_estimates.e2 = second.err_estimate;
  out.err_estimates.e3 = third.err_estimate;

  const double eta2 = eta * eta;
  out.total = out.e0 + eta2 * out.e2 + eta2 * eta * out.e3;
  out.err_estimates.total =
      eta2 * out.err_estimates.e2 + std::abs(eta2 * eta) * out.err_estimates.e3;
  out.converged = second.m1.converged && third.converged;

  const double area = std::abs(field.support_x().length()) * cfg.width();
  if (std::abs(out.m1) < vanishing_moment_fraction * area)
    out.verdict = Verdict::undetermined;
  else if (eta * out.m1 > 0.0 && out.e0 - out.total > out.err_estimates.total)
    out.verdict = Verdict::bound;  // a rarefied region (M1 < 0) binds nothing
  else
    out.verdict = Verdict::unbound_at_this_order;
  return out;
}

}  // namespace wavebound
