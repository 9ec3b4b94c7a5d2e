#pragma once

// Strip geometry and localized density perturbations.
//
// The waveguide is the infinite strip |y| <= b/2 with Dirichlet walls. The
// medium density is Sigma = 1 + sigma(x, y) with sigma localized in x.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wavebound {

inline constexpr double pi = std::numbers::pi;

/// Raised for inputs that violate a domain precondition.
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double length() const { return hi - lo; }
  [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
};

class StripConfig {
public:
  explicit StripConfig(double b) : b_(b) {
    if (!(b > 0.0) || !std::isfinite(b))
      throw DomainError("strip width b must be positive and finite, got " + std::to_string(b));
  }

  [[nodiscard]] double width() const { return b_; }
  [[nodiscard]] double half_width() const { return 0.5 * b_; }

  /// Bottom of the continuum, pi^2 / b^2 (ground transverse mode).
  [[nodiscard]] double threshold() const { return pi * pi / (b_ * b_); }

  /// cos(pi y / b): the unnormalized ground transverse mode.
  [[nodiscard]] double ground_mode(double y) const { return std::cos(pi * y / b_); }

private:
  double b_;
};

inline double threshold(const StripConfig& cfg) { return cfg.threshold(); }

enum class Smoothness { piecewise_constant, smooth };

/// Immutable, shareable scalar field sigma(x, y) with compact x-support.
///
/// Copies share the underlying callable. Evaluation must be pure: the
/// quadrature and eigen solvers call it from arbitrary points in any order.
class DensityField {
public:
  using Fn = std::function<double(double, double)>;

  DensityField(Fn sigma, Interval support_x, Smoothness hint, std::vector<double> breaks_x = {},
               double lower_bound = 0.0, std::string description = "custom")
      : impl_(std::make_shared<const Impl>(Impl{std::move(sigma), support_x, hint,
                                               std::move(breaks_x), lower_bound,
                                               std::move(description)})) {
    if (!(support_x.hi >= support_x.lo) || !std::isfinite(support_x.lo) ||
        !std::isfinite(support_x.hi))
      throw DomainError("density support must be a finite interval");
    if (!(lower_bound > -1.0))
      throw DomainError("density lower bound must exceed -1 so that 1 + sigma > 0");
  }

  double operator()(double x, double y) const {
    if (x < impl_->support.lo || x > impl_->support.hi) return 0.0;
    return impl_->sigma(x, y);
  }

  [[nodiscard]] const Interval& support_x() const { return impl_->support; }
  [[nodiscard]] Smoothness smoothness_hint() const { return impl_->hint; }
  /// x-positions inside the support where sigma is not smooth.
  [[nodiscard]] const std::vector<double>& breaks_x() const { return impl_->breaks; }
  /// Certified lower bound on sigma; 1 + lower_bound > 0.
  [[nodiscard]] double lower_bound() const { return impl_->lower_bound; }
  [[nodiscard]] const std::string& description() const { return impl_->description; }
  [[nodiscard]] bool is_zero() const { return impl_->support.length() == 0.0; }

private:
  struct Impl {
    Fn sigma;
    Interval support;
    Smoothness hint;
    std::vector<double> breaks;
    double lower_bound;
    std::string description;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Piecewise-constant slab of amplitude sigma0 and width delta.
struct SlabProfile {
  double sigma0 = 0.0;
  double delta = 0.0;
  double center = 0.0;

  SlabProfile(double sigma0_, double delta_, double center_ = 0.0)
      : sigma0(sigma0_), delta(delta_), center(center_) {
    if (!(sigma0 > -1.0))
      throw DomainError("slab amplitude must exceed -1 (density must stay positive), got " +
                        std::to_string(sigma0));
    if (!(delta > 0.0)) throw DomainError("slab width must be positive, got " + std::to_string(delta));
  }

  [[nodiscard]] DensityField field() const {
    const double lo = center - 0.5 * delta;
    const double hi = center + 0.5 * delta;
    const double s = sigma0;
    // Closed interval: the jump points take the interior value.
    return DensityField([s, lo, hi](double x, double) { return (x >= lo && x <= hi) ? s : 0.0; },
                        Interval{lo, hi}, Smoothness::piecewise_constant, {},
                        std::min(0.0, sigma0), "slab");
  }
};

inline DensityField make_slab(double sigma0, double delta, double center = 0.0) {
  return SlabProfile(sigma0, delta, center).field();
}

/// sigma identically zero.
inline DensityField make_zero_field() {
  return DensityField([](double, double) { return 0.0; }, Interval{0.0, 0.0}, Smoothness::smooth,
                      {}, 0.0, "zero");
}

/// Gaussian tails below this are treated as exactly zero.
inline constexpr double gaussian_tail_tolerance = 1e-12;

struct GaussianProfile {
  double amplitude = 0.0;
  double x0 = 0.0;
  double y0 = 0.0;
  double wx = 1.0;
  double wy = 1.0;
};

/// amplitude * exp(-(x-x0)^2/(2 wx^2) - (y-y0)^2/(2 wy^2)), truncated where
/// |sigma| < gaussian_tail_tolerance.
inline DensityField make_gaussian(const GaussianProfile& g) {
  if (!(g.amplitude > -1.0))
    throw DomainError("gaussian amplitude must exceed -1 (density must stay positive)");
  if (!(g.wx > 0.0) || !(g.wy > 0.0)) throw DomainError("gaussian widths must be positive");
  const double a = std::abs(g.amplitude);
  if (a <= gaussian_tail_tolerance) return make_zero_field();
  const double reach = g.wx * std::sqrt(2.0 * std::log(a / gaussian_tail_tolerance));
  const Interval support{g.x0 - reach, g.x0 + reach};
  return DensityField(
      [g](double x, double y) {
        const double u = (x - g.x0) / g.wx;
        const double v = (y - g.y0) / g.wy;
        return g.amplitude * std::exp(-0.5 * (u * u + v * v));
      },
      support, Smoothness::smooth, {}, std::min(0.0, g.amplitude), "gaussian");
}

/// Pointwise sum. Rejected when the summed lower bounds could make 1 + sigma <= 0.
inline DensityField make_sum(const std::vector<DensityField>& terms) {
  std::vector<DensityField> live;
  for (const auto& t : terms)
    if (!t.is_zero()) live.push_back(t);
  if (live.empty()) return make_zero_field();
  if (live.size() == 1) return live.front();

  Interval support{live.front().support_x().lo, live.front().support_x().hi};
  std::vector<double> breaks;
  double lower = 0.0;
  bool all_pc = true;
  for (const auto& t : live) {
    support.lo = std::min(support.lo, t.support_x().lo);
    support.hi = std::max(support.hi, t.support_x().hi);
    breaks.insert(breaks.end(), t.breaks_x().begin(), t.breaks_x().end());
    // Component support edges are kinks/jumps of the sum.
    breaks.push_back(t.support_x().lo);
    breaks.push_back(t.support_x().hi);
    lower += t.lower_bound();
    all_pc = all_pc && t.smoothness_hint() == Smoothness::piecewise_constant;
  }
  if (!(lower > -1.0))
    throw DomainError("sum of profiles may make the density non-positive (lower bound " +
                      std::to_string(lower) + ")");
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::erase_if(breaks, [&](double x) { return x <= support.lo || x >= support.hi; });

  return DensityField(
      [live](double x, double y) {
        double s = 0.0;
        for (const auto& t : live) s += t(x, y);
        return s;
      },
      support, all_pc ? Smoothness::piecewise_constant : Smoothness::smooth, std::move(breaks),
      lower, "sum");
}

/// All x-positions where the field is not smooth, including support edges.
inline std::vector<double> field_breakpoints(const DensityField& f) {
  std::vector<double> out{f.support_x().lo};
  out.insert(out.end(), f.breaks_x().begin(), f.breaks_x().end());
  out.push_back(f.support_x().hi);
  return out;
}

/// Rescale geometry by lambda: sigma'(x, y) = sigma(x / lambda, y / lambda).
inline DensityField scale_field(const DensityField& f, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("scale factor must be positive");
  std::vector<double> breaks;
  for (double x : f.breaks_x()) breaks.push_back(lambda * x);
  return DensityField([f, lambda](double x, double y) { return f(x / lambda, y / lambda); },
                      Interval{lambda * f.support_x().lo, lambda * f.support_x().hi},
                      f.smoothness_hint(), std::move(breaks), f.lower_bound(),
                      f.description() + "(scaled)");
}

}  // namespace wavebound
