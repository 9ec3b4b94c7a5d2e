#pragma once

// Finite-difference oracle for  -Laplace(phi) = E Sigma phi  on the truncated
// strip [-L, L] x [-b/2, b/2] with Dirichlet walls on all four sides.
//
// Five-point Laplacian stiffness K, diagonal mass M holding the dual-cell
// average of Sigma, lowest eigenpair of the pencil (K, M) by shifted inverse
// iteration on a sparse LDL^T factorization of K - s M.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavebound/domain.hpp"
#include "wavebound/perturbation.hpp"

namespace wavebound {

class EigenSolveError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// nx, ny count grid cells, so halving h doubles them and nests the grids.
struct GridSpec {
  double L = 12.0;
  int nx = 200;
  int ny = 40;
  std::optional<double> shift{};

  [[nodiscard]] double hx() const { return 2.0 * L / nx; }
  [[nodiscard]] double hy(const StripConfig& cfg) const { return cfg.width() / ny; }
};

inline void validate_grid(const GridSpec& g, const StripConfig& cfg, const DensityField& field) {
  if (g.nx < 16 || g.ny < 16) throw DomainError("grid needs at least 16 cells per direction");
  const Interval s = field.support_x();
  const double half = field.is_zero() ? 0.0 : std::max(std::abs(s.lo), std::abs(s.hi));
  if (!(g.L >= 3.0 * half + 3.0 * cfg.width()))
    throw DomainError("truncation half-length L = " + std::to_string(g.L) +
                      " is below the decay margin 3 * support + 3 b = " +
                      std::to_string(3.0 * half + 3.0 * cfg.width()));
}

struct EigenResult {
  double e_min = 0.0;
  /// Interior nodal values, row-major with x fastest: (ny - 1) rows of (nx - 1).
  std::vector<double> vector;
  int iterations = 0;
  double residual_norm = 0.0;
  bool converged = false;
  double shift = 0.0;
  GridSpec grid;
  double b = 1.0;
  /// max |phi| on the lines |x| = L/2, relative to the peak.
  double localization = 0.0;

  [[nodiscard]] double at(int i, int j) const {
    // i in 0..nx, j in 0..ny including the Dirichlet boundary
    if (i <= 0 || j <= 0 || i >= grid.nx || j >= grid.ny) return 0.0;
    return vector[static_cast<std::size_t>(j - 1) * (grid.nx - 1) + (i - 1)];
  }
};

/// Lowest eigenvalue of the 1D Dirichlet second difference on [-b/2, b/2].
inline double discrete_transverse_threshold(const StripConfig& cfg, int ny) {
  const double hy = cfg.width() / ny;
  const double s = std::sin(pi * hy / (2.0 * cfg.width()));
  return 4.0 / (hy * hy) * s * s;
}

namespace detail {

// Average of sigma over [x0, x1] x [y0, y1]; 3-point Gauss per piece, split at x-breaks.
inline double cell_average(const DensityField& f, const std::vector<double>& breaks, double x0,
                           double x1, double y0, double y1) {
  const Interval s = f.support_x();
  if (x1 <= s.lo || x0 >= s.hi) return 0.0;
  static constexpr std::array<double, 3> gx{-0.774596669241483377035853079956, 0.0,
                                            0.774596669241483377035853079956};
  static constexpr std::array<double, 3> gw{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::vector<double> edges{x0};
  for (double x : breaks)
    if (x > x0 && x < x1) edges.push_back(x);
  edges.push_back(x1);
  const double yc = 0.5 * (y0 + y1);
  const double yh = 0.5 * (y1 - y0);
  double total = 0.0;
  for (std::size_t p = 1; p < edges.size(); ++p) {
    const double xc = 0.5 * (edges[p - 1] + edges[p]);
    const double xh = 0.5 * (edges[p] - edges[p - 1]);
    double piece = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) piece += gw[a] * gw[c] * f(xc + xh * gx[a], yc + yh * gx[c]);
    total += piece * xh * yh;
  }
  return total / ((x1 - x0) * (y1 - y0));
}

}  // namespace detail

struct FdSystem {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::VectorXd mass;
};

inline FdSystem assemble_fd_system(const StripConfig& cfg, const DensityField& field,
                                   const GridSpec& g) {
  const int mx = g.nx - 1;
  const int my = g.ny - 1;
  const double hx = g.hx();
  const double hy = g.hy(cfg);
  const double hb = cfg.half_width();
  const double cx = 1.0 / (hx * hx);
  const double cy = 1.0 / (hy * hy);
  const auto breaks = field_breakpoints(field);

  FdSystem sys;
  const int n = mx * my;
  sys.mass.resize(n);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  for (int j = 0; j < my; ++j) {
    const double y = -hb + (j + 1) * hy;
    for (int i = 0; i < mx; ++i) {
      const double x = -g.L + (i + 1) * hx;
      const int k = j * mx + i;
      trip.emplace_back(k, k, 2.0 * cx + 2.0 * cy);
      if (i > 0) trip.emplace_back(k, k - 1, -cx);
      if (i + 1 < mx) trip.emplace_back(k, k + 1, -cx);
      if (j > 0) trip.emplace_back(k, k - mx, -cy);
      if (j + 1 < my) trip.emplace_back(k, k + mx, -cy);
      const double avg = detail::cell_average(field, breaks, x - 0.5 * hx, x + 0.5 * hx,
                                              y - 0.5 * hy, y + 0.5 * hy);
      sys.mass[k] = 1.0 + avg;
      if (!(sys.mass[k] > 0.0))
        throw DomainError("density 1 + sigma is not positive at a grid node");
    }
  }
  sys.stiffness.resize(n, n);
  sys.stiffness.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

/// Lowest eigenpair of the discretized pencil. Throws EigenSolveError when the
/// factorization fails; returns converged = false when the iteration stalls.
inline EigenResult lowest_mode(const StripConfig& cfg, const DensityField& field,
                               const GridSpec& grid, double tol = 1e-10, int max_iterations = 400) {
  validate_grid(grid, cfg, field);
  const FdSystem sys = assemble_fd_system(cfg, field, grid);
  const int mx = grid.nx - 1;
  const int my = grid.ny - 1;
  const int n = mx * my;

  double shift = 0.0;
  if (grid.shift) {
    shift = *grid.shift;
  } else {
    // Below the perturbative estimate, measured from the discrete continuum edge.
    const double m1 = moment_m1(cfg, field).value;
    const double binding = -e2_from_moment(cfg, m1);
    const double gap = std::pow(pi / (2.0 * grid.L), 2);
    shift = discrete_transverse_threshold(cfg, grid.ny) - 2.0 * binding - 0.5 * gap;
  }

  // By Sylvester's law of inertia the negative pivots of K - s M count the
  // eigenvalues below s. None means the iteration can only reach the lowest mode.
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  for (int attempt = 0;; ++attempt) {
    Eigen::SparseMatrix<double> shifted = sys.stiffness;
    for (int k = 0; k < n; ++k) shifted.coeffRef(k, k) -= shift * sys.mass[k];
    solver.compute(shifted);
    if (solver.info() != Eigen::Success)
      throw EigenSolveError("factorization of K - s M failed (shift " + std::to_string(shift) + ")");
    const auto below = (solver.vectorD().array() <= 0.0).count();
    if (below == 0) break;
    if (grid.shift || attempt >= 8)
      throw EigenSolveError("indefinite shift placement: " + std::to_string(below) +
                            " eigenvalue(s) at or below shift " + std::to_string(shift));
    shift -= 0.5 * std::abs(shift) + 1.0;
  }

  // Positive start vector: overlaps the nodeless ground state.
  Eigen::VectorXd v(n);
  const double hb = cfg.half_width();
  for (int j = 0; j < my; ++j)
    for (int i = 0; i < mx; ++i) {
      const double x = -grid.L + (i + 1) * grid.hx();
      const double y = -hb + (j + 1) * grid.hy(cfg);
      v[j * mx + i] = std::cos(pi * y / cfg.width()) * std::cos(0.5 * pi * x / grid.L);
    }

  EigenResult out;
  out.grid = grid;
  out.b = cfg.width();
  out.shift = shift;
  double lambda = 0.0;
  double lambda_prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd w = solver.solve(sys.mass.cwiseProduct(v));
    if (solver.info() != Eigen::Success) throw EigenSolveError("back-substitution failed");
    const Eigen::VectorXd kw = sys.stiffness * w;
    const Eigen::VectorXd mw = sys.mass.cwiseProduct(w);
    const double mnorm2 = w.dot(mw);
    lambda = w.dot(kw) / mnorm2;
    const double scale = 1.0 / std::sqrt(mnorm2);
    v = w * scale;
    const double res = (kw - lambda * mw).norm() / (std::abs(lambda) * mw.norm());
    out.iterations = it;
    out.residual_norm = res;
    if (it > 1 && res <= tol && std::abs(lambda - lambda_prev) <= tol * std::abs(lambda)) {
      out.converged = true;
      break;
    }
    lambda_prev = lambda;
  }
  out.e_min = lambda;

  // Max-normalize with a positive peak.
  Eigen::Index peak_idx = 0;
  v.cwiseAbs().maxCoeff(&peak_idx);
  v /= v[peak_idx];
  out.vector.assign(v.data(), v.data() + n);

  // The ground state is nodeless; a sign change means the iteration found another mode.
  const double most_negative = v.minCoeff();
  if (most_negative < -1e-6) out.converged = false;

  double edge = 0.0;
  for (int i = 0; i < mx; ++i) {
    const double x = -grid.L + (i + 1) * grid.hx();
    if (std::abs(std::abs(x) - 0.5 * grid.L) <= 0.5 * grid.hx() + 1e-12 * grid.L)
      for (int j = 0; j < my; ++j) edge = std::max(edge, std::abs(v[j * mx + i]));
  }
  out.localization = edge;
  return out;
}

struct Extrapolation {
  double energy = 0.0;
  double error_bar = 0.0;
  /// Observed convergence order (NaN with fewer than three grids).
  double order = std::nan("");
  bool extrapolated = false;
  std::vector<double> raw;
};

/// Richardson extrapolation in h^2 over grids refined at fixed L, coarse to fine.
inline Extrapolation refine(const std::vector<EigenResult>& results) {
  if (results.size() < 2) throw DomainError("refinement needs at least two grids");
  Extrapolation out;
  for (const auto& r : results) out.raw.push_back(r.e_min);
  for (std::size_t k = 1; k < results.size(); ++k) {
    if (results[k].grid.L != results[0].grid.L)
      throw DomainError("refinement grids must share the truncation length");
    if (!(results[k].grid.hx() < results[k - 1].grid.hx()))
      throw DomainError("refinement grids must be ordered coarse to fine");
  }

  const auto& e = out.raw;
  const std::size_t m = e.size();
  bool monotone = true;
  for (std::size_t k = 2; k < m; ++k)
    if ((e[k] - e[k - 1]) * (e[k - 1] - e[k - 2]) <= 0.0) monotone = false;
  if (m >= 2 && e[m - 1] == e[m - 2]) monotone = false;
  if (!monotone) {
    out.energy = e.back();
    out.error_bar = m >= 2 ? std::abs(e[m - 1] - e[m - 2]) : 0.0;
    return out;
  }

  auto richardson = [&](std::size_t coarse, std::size_t fine) {
    const double r = results[coarse].grid.hx() / results[fine].grid.hx();
    return e[fine] + (e[fine] - e[coarse]) / (r * r - 1.0);
  };
  out.extrapolated = true;
  out.energy = richardson(m - 2, m - 1);
  if (m >= 3) {
    const double r = results[m - 2].grid.hx() / results[m - 1].grid.hx();
    out.order = std::log(std::abs((e[m - 3] - e[m - 2]) / (e[m - 2] - e[m - 1]))) / std::log(r);
    out.error_bar = std::abs(out.energy - richardson(m - 3, m - 2));
  } else {
    out.error_bar = std::abs(out.energy - e.back());
  }
  return out;
}

/// Self-describing text export of the eigenvector on the full grid, boundary included.
inline void write_eigenvector(std::ostream& os, const EigenResult& r) {
  os << "# wavebound eigenvector v1\n";
  os.precision(17);
  os << "b " << r.b << "\nL " << r.grid.L << "\nnx " << r.grid.nx << "\nny " << r.grid.ny
     << "\ne_min " << r.e_min << "\n";
  os << "# rows: y_j = -b/2 + j b/ny (j = 0..ny); columns: x_i = -L + 2 i L/nx (i = 0..nx)\n";
  for (int j = 0; j <= r.grid.ny; ++j) {
    for (int i = 0; i <= r.grid.nx; ++i) {
      if (i) os << ' ';
      os << r.at(i, j);
    }
    os << '\n';
  }
}

inline EigenResult read_eigenvector(std::istream& is) {
  EigenResult r;
  std::string line;
  auto next_data_line = [&]() -> std::string {
    while (std::getline(is, line))
      if (!line.empty() && line[0] != '#') return line;
    throw std::runtime_error("eigenvector file truncated");
  };
  auto field = [&](const char* key) {
    std::istringstream ss(next_data_line());
    std::string k;
    double v = 0.0;
    ss >> k >> v;
    if (k != key) throw std::runtime_error(std::string("expected key ") + key + ", got " + k);
    return v;
  };
  r.b = field("b");
  r.grid.L = field("L");
  r.grid.nx = static_cast<int>(field("nx"));
  r.grid.ny = static_cast<int>(field("ny"));
  r.e_min = field("e_min");
  const int mx = r.grid.nx - 1;
  r.vector.assign(static_cast<std::size_t>(mx) * (r.grid.ny - 1), 0.0);
  for (int j = 0; j <= r.grid.ny; ++j) {
    std::istringstream ss(next_data_line());
    for (int i = 0; i <= r.grid.nx; ++i) {
      double v = 0.0;
      if (!(ss >> v)) throw std::runtime_error("eigenvector row too short");
      if (i > 0 && j > 0 && i < r.grid.nx && j < r.grid.ny)
        r.vector[static_cast<std::size_t>(j - 1) * mx + (i - 1)] = v;
    }
  }
  r.converged = true;
  return r;
}

}  // namespace wavebound
