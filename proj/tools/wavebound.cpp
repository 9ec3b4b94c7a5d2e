// wavebound: perturbative, variational and oracle estimates of the ground
// state of a Dirichlet strip with a density heterogeneity.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wavebound/fd_oracle.hpp"
#include "wavebound/greens.hpp"
#include "wavebound/perturbation.hpp"
#include "wavebound/run_config.hpp"
#include "wavebound/slab_oracle.hpp"
#include "wavebound/variational.hpp"

using namespace wavebound;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_nonconvergence = 3;

class NonConvergence : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string describe(const DensitySpec& spec) {
  struct Visitor {
    std::string operator()(const ZeroSpec&) const { return "zero"; }
    std::string operator()(const SlabProfile& s) const {
      std::ostringstream os;
      os << "slab(sigma0=" << s.sigma0 << ", delta=" << s.delta << ", center=" << s.center << ")";
      return os.str();
    }
    std::string operator()(const GaussianProfile& g) const {
      std::ostringstream os;
      os << "gaussian(A=" << g.amplitude << ", x0=" << g.x0 << ", y0=" << g.y0 << ", wx=" << g.wx
         << ", wy=" << g.wy << ")";
      return os.str();
    }
    std::string operator()(const SumSpec& s) const {
      std::string out = "sum[";
      for (std::size_t i = 0; i < s.terms.size(); ++i)
        out += (i ? ", " : "") + describe(s.terms[i]);
      return out + "]";
    }
  };
  return std::visit(Visitor{}, spec);
}

// Prints either an aligned table row or a key=value record.
class Report {
public:
  Report(OutputFormat fmt, std::ostream& os) : fmt_(fmt), os_(os), rec_(os) {}

  [[nodiscard]] bool human() const { return fmt_ == OutputFormat::human; }

  void heading(const std::string& text) {
    if (human()) os_ << "\n" << text << "\n";
  }
  void line(const std::string& text) {
    if (human()) os_ << text << "\n";
  }

  template <class T>
  void value(const std::string& key, const std::string& label, const T& v) {
    if (human()) {
      std::ostringstream s;
      if constexpr (std::is_floating_point_v<T>) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
        s << buf;
      } else if constexpr (std::is_same_v<T, bool>) {
        s << (v ? "yes" : "no");
      } else {
        s << v;
      }
      char lab[64];
      std::snprintf(lab, sizeof lab, "  %-28s", label.c_str());
      os_ << lab << s.str() << "\n";
    } else {
      rec_.put(key, v);
    }
  }

private:
  OutputFormat fmt_;
  std::ostream& os_;
  RecordWriter rec_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int cmd_energy(const RunConfig& rc, Report& out) {
  const StripConfig cfg = rc.strip();
  const DensityField field = rc.field();
  const PerturbativeEnergy pe =
      assemble(cfg, field, rc.eta, rc.moment_spec(), rc.pair_spec(), rc.tol.greens);
  const VariationalResult var = variational_estimate(cfg, field, rc.moment_spec(), rc.eta);

  out.line("strip b = " + fmt("%.12g", rc.b) + ", density " + describe(rc.density));
  out.value("b", "width b", rc.b);
  out.value("eta", "strength eta", pe.eta);
  out.heading("perturbative energy");
  out.value("e0", "E0 (threshold)", pe.e0);
  out.value("m1", "M1", pe.m1);
  out.value("m1_err", "  error", pe.err_estimates.m1);
  out.value("e1", "E1", first_order(cfg, field));
  out.value("e2", "E2", pe.e2);
  out.value("e2_err", "  error", pe.err_estimates.e2);
  out.value("e3", "E3", pe.e3);
  out.value("e3_err", "  error", pe.err_estimates.e3);
  out.value("total", "E0 + eta^2 E2 + eta^3 E3", pe.total);
  out.value("total_err", "  error", pe.err_estimates.total);
  out.value("verdict", "verdict", to_string(pe.verdict));
  out.heading("variational bound");
  out.value("var_a", "decay rate a", var.a);
  out.value("var_w", "W", var.w);
  out.value("var_bound_exists", "bound state (a > 0)", var.bound_exists);
  if (var.bound_exists) {
    out.value("var_quotient", "Rayleigh quotient at a", var.quotient);
    out.value("var_quotient_err", "  error", var.quotient_err);
  }
  out.value("converged", "converged", pe.converged);
  if (pe.weak_coupling_warning) out.value("warning_eta", "warning", std::string("|eta|>1"));
  if (var.strong_field_warning)
    out.value("warning_field", "warning", std::string("max|sigma|>0.3"));
  if (!pe.converged) throw NonConvergence("perturbative quadrature did not converge");
  return exit_ok;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

const SlabProfile& require_slab(const RunConfig& rc) {
  const auto* slab = std::get_if<SlabProfile>(&rc.density);
  if (!slab) throw ConfigError("density", "the slab command needs a single slab profile");
  return *slab;
}

int cmd_slab(const RunConfig& rc, Report& out) {
  const StripConfig cfg = rc.strip();
  const SlabProfile& slab = require_slab(rc);
  const SlabSolution sol = solve_slab(cfg, slab, rc.tol.slab_residual);
  const int order = rc.slab_sweep.order;
  const SlabSeries series = slab_series(cfg, slab.delta, order);

  out.line("slab sigma0 = " + fmt("%.12g", slab.sigma0) + ", delta = " + fmt("%.12g", slab.delta) +
           ", b = " + fmt("%.12g", rc.b));
  out.heading("exact root");
  out.value("sigma0", "sigma0", slab.sigma0);
  out.value("delta", "delta", slab.delta);
  out.value("p2", "p2", sol.p2);
  out.value("p1", "p1", sol.p1);
  out.value("energy", "energy", sol.energy);
  out.value("residual", "residual", sol.residual);
  out.value("iterations", "root iterations", sol.iterations);
  out.value("a1", "a1", sol.amplitudes[0]);
  out.value("a2", "a2", sol.amplitudes[1]);
  out.value("a3", "a3", sol.amplitudes[2]);

  out.heading("series coefficients (power of sigma0)");
  for (int k = 0; k <= order; ++k) {
    const std::string s = std::to_string(k);
    out.value("series_energy_" + s, "energy  [" + s + "]", series.energy[k]);
    out.value("series_p1_" + s, "p1      [" + s + "]", series.p1[k]);
    out.value("series_p2sq_" + s, "p2^2    [" + s + "]", series.p2sq[k]);
  }
  out.value("series_energy", "series energy at sigma0",
            SlabSeries::evaluate(series.energy, slab.sigma0));

  out.heading("series vs root");
  out.line("  sigma0        exact               series              |error|");
  std::vector<double> xs, errs;
  for (std::size_t i = 0; i < rc.slab_sweep.sigma.size(); ++i) {
    const double s = rc.slab_sweep.sigma[i];
    const SlabSolution si = solve_slab(cfg, SlabProfile(s, slab.delta), rc.tol.slab_residual);
    const double approx = SlabSeries::evaluate(series.energy, s);
    const double err = std::abs(si.energy - approx);
    if (err > 0.0) {
      xs.push_back(s);
      errs.push_back(err);
    }
    if (out.human()) {
      char row[160];
      std::snprintf(row, sizeof row, "  %-12.6g  %-18.12g  %-18.12g  %.3e", s, si.energy, approx, err);
      out.line(row);
    } else {
      const std::string k = "sweep_" + std::to_string(i) + "_";
      out.value(k + "sigma0", "", s);
      out.value(k + "exact", "", si.energy);
      out.value(k + "series", "", approx);
      out.value(k + "error", "", err);
    }
  }
  if (xs.size() >= 2)
    out.value("error_slope", "log-log error slope", loglog_slope(xs, errs));
  out.value("expected_slope", "expected slope", static_cast<double>(order + 1));
  return exit_ok;
}

int cmd_oracle(const RunConfig& rc, Report& out) {
  const StripConfig cfg = rc.strip();
  const DensityField field = rc.field();
  const OracleSpec& o = rc.oracle;
  bool all_converged = true;

  out.line("oracle on [-L, L] x [-b/2, b/2], density " + describe(rc.density));
  out.heading("truncation sweep (fixed h)");
  if (out.human()) out.line("  L         nx     ny    e_min               change        localization");
  const double hx = 2.0 * o.L / o.nx;
  double prev = std::nan("");
  int row = 0;
  for (double L : o.l_sweep) {
    GridSpec g{L, std::max(16, static_cast<int>(std::lround(2.0 * L / hx))), o.ny, o.shift};
    EigenResult r;
    try {
      r = lowest_mode(cfg, field, g, rc.tol.eigen);
    } catch (const DomainError& e) {
      out.line("  " + fmt("%-8.4g", L) + "  skipped: " + e.what());
      continue;
    }
    all_converged = all_converged && r.converged;
    const double change = r.e_min - prev;
    if (out.human()) {
      char buf[200];
      const std::string delta = std::isnan(change) ? "-" : fmt("%.3e", change);
      std::snprintf(buf, sizeof buf, "  %-8.4g  %-5d  %-4d  %-18.12g  %-12s  %.3e%s", L, g.nx, g.ny,
                    r.e_min, delta.c_str(), r.localization, r.converged ? "" : "  (not converged)");
      out.line(buf);
    } else {
      const std::string k = "lsweep_" + std::to_string(row) + "_";
      out.value(k + "L", "", L);
      out.value(k + "nx", "", g.nx);
      out.value(k + "e_min", "", r.e_min);
      out.value(k + "converged", "", r.converged);
    }
    prev = r.e_min;
    ++row;
  }

  out.heading("resolution sweep at L = " + fmt("%.6g", o.L));
  if (out.human()) out.line("  nx     ny    e_min               iterations  residual");
  std::vector<EigenResult> results;
  for (int k = 0; k < o.refinements; ++k) {
    GridSpec g{o.L, o.nx << k, o.ny << k, o.shift};
    results.push_back(lowest_mode(cfg, field, g, rc.tol.eigen));
    const EigenResult& r = results.back();
    all_converged = all_converged && r.converged;
    if (out.human()) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "  %-5d  %-4d  %-18.12g  %-10d  %.2e%s", g.nx, g.ny, r.e_min,
                    r.iterations, r.residual_norm, r.converged ? "" : "  (not converged)");
      out.line(buf);
    } else {
      const std::string p = "hsweep_" + std::to_string(k) + "_";
      out.value(p + "nx", "", g.nx);
      out.value(p + "ny", "", g.ny);
      out.value(p + "e_min", "", r.e_min);
      out.value(p + "iterations", "", r.iterations);
      out.value(p + "residual", "", r.residual_norm);
      out.value(p + "converged", "", r.converged);
    }
  }
  const Extrapolation ex = refine(results);
  out.heading("extrapolation");
  out.value("extrapolated", "h^2 extrapolation applied", ex.extrapolated);
  out.value("e_oracle", "oracle energy", ex.energy);
  out.value("e_oracle_err", "  error bar", ex.error_bar);
  if (!std::isnan(ex.order)) out.value("observed_order", "observed order", ex.order);
  out.value("localization", "|phi| at |x| = L/2 / peak", results.back().localization);
  out.value("threshold", "threshold pi^2/b^2", cfg.threshold());
  out.value("below_threshold", "below threshold", ex.energy < cfg.threshold());

  out.heading("comparison");
  const PerturbativeEnergy pe =
      assemble(cfg, field, rc.eta, rc.moment_spec(), rc.pair_spec(), rc.tol.greens);
  out.value("e_perturbative", "perturbative total", pe.total);
  out.value("rel_diff_perturbative", "  relative difference", (ex.energy - pe.total) / pe.total);
  all_converged = all_converged && pe.converged;
  if (const auto* slab = std::get_if<SlabProfile>(&rc.density); slab && slab->sigma0 > 0.0) {
    const SlabSolution sol = solve_slab(cfg, *slab, rc.tol.slab_residual);
    out.value("e_exact", "exact slab energy", sol.energy);
    out.value("rel_diff_exact", "  relative difference", (ex.energy - sol.energy) / sol.energy);
  }

  if (!rc.eigenvector_path.empty()) {
    std::ofstream f(rc.eigenvector_path);
    if (!f) throw ConfigError("output.eigenvector", "cannot write " + rc.eigenvector_path);
    write_eigenvector(f, results.back());
    out.value("eigenvector", "eigenvector written to", rc.eigenvector_path);
  }
  out.value("converged", "converged", all_converged);
  if (!all_converged) throw NonConvergence("eigen iteration did not converge on every grid");
  return exit_ok;
}

int cmd_greens(const RunConfig& rc, Report& out) {
  const StripConfig cfg = rc.strip();
  const GreensPoint& p = rc.greens;
  const GreensEval g = g2_zero(p.x1, p.y1, p.x2, p.y2, cfg, rc.tol.greens);
  out.line("G2 at (" + fmt("%.6g", p.x1) + ", " + fmt("%.6g", p.y1) + ") - (" + fmt("%.6g", p.x2) +
           ", " + fmt("%.6g", p.y2) + "), b = " + fmt("%.6g", rc.b));
  out.value("x1", "x1", p.x1);
  out.value("y1", "y1", p.y1);
  out.value("x2", "x2", p.x2);
  out.value("y2", "y2", p.y2);
  out.value("value", "value", g.value);
  out.value("n_terms", "modes summed", g.n_terms_used);
  out.value("tail_bound", "tail bound", g.tail_bound);
  out.value("regime", "regime",
            std::string(g.regime == GreensRegime::direct_sum ? "direct-sum" : "small-separation"));
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground state of a Dirichlet strip with a localized density heterogeneity"};
  app.require_subcommand(1);

  std::string config_path;
  std::string format;
  std::optional<double> tol_quad_2d, tol_quad_4d, tol_greens, tol_slab, tol_eigen;
  std::string eigenvector;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--format", format, "human or records")
      ->check(CLI::IsMember({"human", "records"}));
  app.add_option("--tol-quad-2d", tol_quad_2d, "relative tolerance of strip integrals");
  app.add_option("--tol-quad-4d", tol_quad_4d, "relative tolerance of pair integrals");
  app.add_option("--tol-greens", tol_greens, "G2 tail tolerance");
  app.add_option("--tol-slab", tol_slab, "slab root residual tolerance");
  app.add_option("--tol-eigen", tol_eigen, "eigen iteration tolerance");

  auto* energy = app.add_subcommand("energy", "perturbative and variational energy");
  auto* slab = app.add_subcommand("slab", "exact slab root and series");
  auto* oracle = app.add_subcommand("oracle", "finite-difference eigenvalue oracle");
  auto* greens = app.add_subcommand("greens", "point evaluation of G2");
  oracle->add_option("--eigenvector", eigenvector, "write the finest eigenvector to this file");
  app.fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_config;
  }

  RunConfig rc;
  try {
    rc = load_run_config(config_path);
    if (!format.empty()) rc.format = parse_format(format, "--format");
    auto override = [](const std::optional<double>& v, double& dst, const char* flag) {
      if (!v) return;
      if (!(*v > 0.0)) throw ConfigError(flag, "must be positive");
      dst = *v;
    };
    override(tol_quad_2d, rc.tol.quad_rel_2d, "--tol-quad-2d");
    override(tol_quad_4d, rc.tol.quad_rel_4d, "--tol-quad-4d");
    override(tol_greens, rc.tol.greens, "--tol-greens");
    override(tol_slab, rc.tol.slab_residual, "--tol-slab");
    override(tol_eigen, rc.tol.eigen, "--tol-eigen");
    if (!eigenvector.empty()) rc.eigenvector_path = eigenvector;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  }

  Report out(rc.format, std::cout);
  try {
    if (*energy) return cmd_energy(rc, out);
    if (*slab) return cmd_slab(rc, out);
    if (*oracle) return cmd_oracle(rc, out);
    if (*greens) return cmd_greens(rc, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return exit_config;
  } catch (const NonConvergence& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const SlabRootError& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const EigenSolveError& e) {
    std::cerr << "not converged: " << e.what() << "\n";
    return exit_nonconvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_ok;
}
