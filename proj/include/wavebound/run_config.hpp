#pragma once

// JSON run configuration and line-delimited key=value records.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "wavebound/domain.hpp"
#include "wavebound/quadrature.hpp"

namespace wavebound {

inline constexpr const char* run_schema = "wavebound.run/1";

/// Malformed or invalid configuration; `path()` names the offending field.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  [[nodiscard]] const std::string& path() const { return path_; }

private:
  std::string path_;
};

struct ZeroSpec {};
struct SumSpec;
using DensitySpec = std::variant<ZeroSpec, SlabProfile, GaussianProfile, SumSpec>;
struct SumSpec {
  std::vector<DensitySpec> terms;
};

inline DensityField build_field(const DensitySpec& spec) {
  struct Visitor {
    DensityField operator()(const ZeroSpec&) const { return make_zero_field(); }
    DensityField operator()(const SlabProfile& s) const { return s.field(); }
    DensityField operator()(const GaussianProfile& g) const { return make_gaussian(g); }
    DensityField operator()(const SumSpec& s) const {
      std::vector<DensityField> fields;
      for (const auto& t : s.terms) fields.push_back(build_field(t));
      return make_sum(fields);
    }
  };
  return std::visit(Visitor{}, spec);
}

/// Defaults for the command-line front end.
struct Tolerances {
  double quad_rel_2d = 1e-6;
  double quad_rel_4d = 1e-5;
  double quad_abs = 1e-14;
  int max_subdivisions = 2000;
  double greens = 1e-10;
  double slab_residual = 1e-12;
  double eigen = 1e-10;
};

struct OracleSpec {
  double L = 12.0;
  int nx = 100;
  int ny = 20;
  int refinements = 3;
  std::vector<double> l_sweep{6.0, 9.0, 12.0};
  /// Spectral shift for inverse iteration; chosen automatically when absent.
  std::optional<double> shift;
};

struct SlabSweep {
  std::vector<double> sigma{0.02, 0.04, 0.08};
  int order = 5;
};

struct GreensPoint {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 1.0;
  double y2 = 0.0;
};

enum class OutputFormat { human, records };

struct RunConfig {
  double b = 1.0;
  DensitySpec density = ZeroSpec{};
  double eta = 1.0;
  Tolerances tol;
  OracleSpec oracle;
  SlabSweep slab_sweep;
  GreensPoint greens;
  OutputFormat format = OutputFormat::human;
  std::string eigenvector_path;

  [[nodiscard]] StripConfig strip() const { return StripConfig(b); }
  [[nodiscard]] DensityField field() const { return build_field(density); }
  [[nodiscard]] QuadratureSpec moment_spec() const {
    return QuadratureSpec{tol.quad_rel_2d, tol.quad_abs, tol.max_subdivisions, {}, {}};
  }
  [[nodiscard]] QuadratureSpec pair_spec() const {
    return QuadratureSpec{tol.quad_rel_4d, tol.quad_abs, tol.max_subdivisions, {}, {}};
  }
};

namespace detail {

using nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline const json* member(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

inline double read_number(const json& obj, const std::string& key, const std::string& path,
                          std::optional<double> fallback = std::nullopt) {
  const json* v = member(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError(join(path, key), "required number is missing");
  }
  if (!v->is_number()) throw ConfigError(join(path, key), "expected a number");
  const double d = v->get<double>();
  if (!std::isfinite(d)) throw ConfigError(join(path, key), "must be finite");
  return d;
}

inline int read_int(const json& obj, const std::string& key, const std::string& path, int fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v->get<int>();
}

inline const json& read_object(const json& obj, const std::string& key, const std::string& path) {
  const json* v = member(obj, key);
  if (!v) throw ConfigError(join(path, key), "required object is missing");
  if (!v->is_object()) throw ConfigError(join(path, key), "expected an object");
  return *v;
}

inline std::vector<double> read_numbers(const json& obj, const std::string& key,
                                        const std::string& path, std::vector<double> fallback) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_array()) throw ConfigError(join(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    const auto& e = (*v)[i];
    if (!e.is_number())
      throw ConfigError(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(e.get<double>());
  }
  return out;
}

inline void reject_unknown(const json& obj, const std::string& path,
                           std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw ConfigError(join(path, it.key()), "unknown key");
  }
}

inline DensitySpec parse_density(const json& d, const std::string& path) {
  if (!d.is_object()) throw ConfigError(path, "expected an object");
  const json* type = member(d, "type");
  if (!type || !type->is_string()) throw ConfigError(path + ".type", "expected a profile name");
  const std::string t = type->get<std::string>();
  if (t == "zero") {
    reject_unknown(d, path, {"type"});
    return ZeroSpec{};
  }
  if (t == "slab") {
    reject_unknown(d, path, {"type", "sigma0", "delta", "center"});
    const double s = read_number(d, "sigma0", path);
    const double w = read_number(d, "delta", path);
    const double c = read_number(d, "center", path, 0.0);
    if (!(s > -1.0)) throw ConfigError(path + ".sigma0", "must exceed -1 (density positivity)");
    if (!(w > 0.0)) throw ConfigError(path + ".delta", "must be positive");
    return SlabProfile(s, w, c);
  }
  if (t == "gaussian") {
    reject_unknown(d, path, {"type", "amplitude", "x0", "y0", "wx", "wy"});
    GaussianProfile g;
    g.amplitude = read_number(d, "amplitude", path);
    g.x0 = read_number(d, "x0", path, 0.0);
    g.y0 = read_number(d, "y0", path, 0.0);
    g.wx = read_number(d, "wx", path);
    g.wy = read_number(d, "wy", path);
    if (!(g.amplitude > -1.0))
      throw ConfigError(path + ".amplitude", "must exceed -1 (density positivity)");
    if (!(g.wx > 0.0)) throw ConfigError(path + ".wx", "must be positive");
    if (!(g.wy > 0.0)) throw ConfigError(path + ".wy", "must be positive");
    return g;
  }
  if (t == "sum") {
    reject_unknown(d, path, {"type", "terms"});
    const json* terms = member(d, "terms");
    if (!terms || !terms->is_array() || terms->empty())
      throw ConfigError(path + ".terms", "expected a non-empty array of profiles");
    SumSpec s;
    for (std::size_t i = 0; i < terms->size(); ++i)
      s.terms.push_back(parse_density((*terms)[i], path + ".terms[" + std::to_string(i) + "]"));
    return s;
  }
  throw ConfigError(path + ".type", "unknown profile '" + t + "' (slab, gaussian, sum, zero)");
}

}  // namespace detail

inline OutputFormat parse_format(const std::string& s, const std::string& path = "output.format") {
  if (s == "human") return OutputFormat::human;
  if (s == "records") return OutputFormat::records;
  throw ConfigError(path, "expected 'human' or 'records', got '" + s + "'");
}

inline RunConfig parse_run_config(const std::string& text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("<document>", "top level must be an object");
  detail::reject_unknown(root, "", {"schema", "strip", "density", "eta", "tolerances", "oracle",
                                    "slab_sweep", "greens", "output"});
  const json* schema = detail::member(root, "schema");
  if (!schema || !schema->is_string())
    throw ConfigError("schema", std::string("missing; expected \"") + run_schema + "\"");
  if (schema->get<std::string>() != run_schema)
    throw ConfigError("schema", "unsupported version '" + schema->get<std::string>() +
                                    "', expected '" + run_schema + "'");

  RunConfig cfg;
  const json& strip = detail::read_object(root, "strip", "");
  detail::reject_unknown(strip, "strip", {"b"});
  cfg.b = detail::read_number(strip, "b", "strip");
  if (!(cfg.b > 0.0)) throw ConfigError("strip.b", "must be positive");

  if (const json* d = detail::member(root, "density")) cfg.density = detail::parse_density(*d, "density");
  cfg.eta = detail::read_number(root, "eta", "", 1.0);

  if (const json* t = detail::member(root, "tolerances")) {
    if (!t->is_object()) throw ConfigError("tolerances", "expected an object");
    detail::reject_unknown(*t, "tolerances", {"quad_rel_2d", "quad_rel_4d", "quad_abs",
                                              "max_subdivisions", "greens", "slab_residual",
                                              "eigen"});
    Tolerances& x = cfg.tol;
    x.quad_rel_2d = detail::read_number(*t, "quad_rel_2d", "tolerances", x.quad_rel_2d);
    x.quad_rel_4d = detail::read_number(*t, "quad_rel_4d", "tolerances", x.quad_rel_4d);
    x.quad_abs = detail::read_number(*t, "quad_abs", "tolerances", x.quad_abs);
    x.max_subdivisions = detail::read_int(*t, "max_subdivisions", "tolerances", x.max_subdivisions);
    x.greens = detail::read_number(*t, "greens", "tolerances", x.greens);
    x.slab_residual = detail::read_number(*t, "slab_residual", "tolerances", x.slab_residual);
    x.eigen = detail::read_number(*t, "eigen", "tolerances", x.eigen);
  }
  for (auto [name, v] : {std::pair{"quad_rel_2d", cfg.tol.quad_rel_2d},
                         std::pair{"quad_rel_4d", cfg.tol.quad_rel_4d},
                         std::pair{"quad_abs", cfg.tol.quad_abs}, std::pair{"greens", cfg.tol.greens},
                         std::pair{"slab_residual", cfg.tol.slab_residual},
                         std::pair{"eigen", cfg.tol.eigen}})
    if (!(v > 0.0)) throw ConfigError(std::string("tolerances.") + name, "must be positive");
  if (cfg.tol.max_subdivisions < 1)
    throw ConfigError("tolerances.max_subdivisions", "must be at least 1");

  if (const json* o = detail::member(root, "oracle")) {
    if (!o->is_object()) throw ConfigError("oracle", "expected an object");
    detail::reject_unknown(*o, "oracle", {"L", "nx", "ny", "refinements", "l_sweep", "shift"});
    OracleSpec& g = cfg.oracle;
    g.L = detail::read_number(*o, "L", "oracle", g.L);
    g.nx = detail::read_int(*o, "nx", "oracle", g.nx);
    g.ny = detail::read_int(*o, "ny", "oracle", g.ny);
    g.refinements = detail::read_int(*o, "refinements", "oracle", g.refinements);
    g.l_sweep = detail::read_numbers(*o, "l_sweep", "oracle", {g.L / 2, 3 * g.L / 4, g.L});
    if (detail::member(*o, "shift")) g.shift = detail::read_number(*o, "shift", "oracle", 0.0);
  }
  if (!(cfg.oracle.L > 0.0)) throw ConfigError("oracle.L", "must be positive");
  if (cfg.oracle.nx < 16) throw ConfigError("oracle.nx", "must be at least 16");
  if (cfg.oracle.ny < 16) throw ConfigError("oracle.ny", "must be at least 16");
  if (cfg.oracle.refinements < 2) throw ConfigError("oracle.refinements", "must be at least 2");
  for (std::size_t i = 0; i < cfg.oracle.l_sweep.size(); ++i)
    if (!(cfg.oracle.l_sweep[i] > 0.0 && cfg.oracle.l_sweep[i] <= cfg.oracle.L))
      throw ConfigError("oracle.l_sweep[" + std::to_string(i) + "]", "must lie in (0, L]");

  if (const json* s = detail::member(root, "slab_sweep")) {
    if (!s->is_object()) throw ConfigError("slab_sweep", "expected an object");
    detail::reject_unknown(*s, "slab_sweep", {"sigma", "order"});
    cfg.slab_sweep.sigma = detail::read_numbers(*s, "sigma", "slab_sweep", cfg.slab_sweep.sigma);
    cfg.slab_sweep.order = detail::read_int(*s, "order", "slab_sweep", cfg.slab_sweep.order);
  }
  if (cfg.slab_sweep.order < 2 || cfg.slab_sweep.order > 5)
    throw ConfigError("slab_sweep.order", "must lie in 2..5");
  for (std::size_t i = 0; i < cfg.slab_sweep.sigma.size(); ++i)
    if (!(cfg.slab_sweep.sigma[i] > 0.0))
      throw ConfigError("slab_sweep.sigma[" + std::to_string(i) + "]", "must be positive");

  if (const json* g = detail::member(root, "greens")) {
    if (!g->is_object()) throw ConfigError("greens", "expected an object");
    detail::reject_unknown(*g, "greens", {"x1", "y1", "x2", "y2"});
    cfg.greens.x1 = detail::read_number(*g, "x1", "greens", cfg.greens.x1);
    cfg.greens.y1 = detail::read_number(*g, "y1", "greens", cfg.greens.y1);
    cfg.greens.x2 = detail::read_number(*g, "x2", "greens", cfg.greens.x2);
    cfg.greens.y2 = detail::read_number(*g, "y2", "greens", cfg.greens.y2);
  }

  if (const json* o = detail::member(root, "output")) {
    if (!o->is_object()) throw ConfigError("output", "expected an object");
    detail::reject_unknown(*o, "output", {"format", "eigenvector"});
    if (const json* f = detail::member(*o, "format")) {
      if (!f->is_string()) throw ConfigError("output.format", "expected a string");
      cfg.format = parse_format(f->get<std::string>());
    }
    if (const json* e = detail::member(*o, "eigenvector")) {
      if (!e->is_string()) throw ConfigError("output.eigenvector", "expected a file path");
      cfg.eigenvector_path = e->get<std::string>();
    }
  }

  // Building the field checks density positivity of sums.
  try {
    (void)cfg.field();
  } catch (const DomainError& e) {
    throw ConfigError("density", e.what());
  }
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

struct Record {
  std::string key;
  std::string value;
};

/// key=value lines. Keys must not contain '=' or whitespace; values must be single-line.
class RecordWriter {
public:
  explicit RecordWriter(std::ostream& os) : os_(os) {}

  void put(const std::string& key, double v) { emit(key, format_double(v)); }
  void put(const std::string& key, long v) { emit(key, std::to_string(v)); }
  void put(const std::string& key, int v) { emit(key, std::to_string(v)); }
  void put(const std::string& key, bool v) { emit(key, v ? "true" : "false"); }
  void put(const std::string& key, const std::string& v) { emit(key, v); }
  void put(const std::string& key, const char* v) { emit(key, v); }

private:
  void emit(const std::string& key, const std::string& value) {
    if (key.empty() || key.find_first_of("= \t\n") != std::string::npos)
      throw std::invalid_argument("bad record key '" + key + "'");
    if (value.find('\n') != std::string::npos)
      throw std::invalid_argument("record value for '" + key + "' spans lines");
    os_ << key << '=' << value << '\n';
  }
  std::ostream& os_;
};

inline std::vector<Record> parse_records(std::istream& is) {
  std::vector<Record> out;
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("record line " + std::to_string(n) + " lacks key=value");
    out.push_back({line.substr(0, eq), line.substr(eq + 1)});
  }
  return out;
}

}  // namespace wavebound
