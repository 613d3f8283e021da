#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "slrd/config.hpp"

namespace slrd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(s);
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Section {
 public:
  Section(std::string name, std::map<std::string, std::string> values)
      : name_(std::move(name)), values_(std::move(values)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string field(const std::string& key) const { return "[" + name_ + "] " + key; }

  [[noreturn]] void bad(const std::string& key, const std::string& what) const {
    fail(ErrorKind::validation, field(key) + ": " + what);
  }

  std::string raw(const std::string& key) {
    used_.insert(key);
    return values_.at(key);
  }

  void text(const std::string& key, std::string& out) {
    if (has(key)) out = raw(key);
  }

  void real(const std::string& key, double& out) {
    if (has(key)) out = to_double(key, raw(key));
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const std::string v = raw(key);
    int x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size()) bad(key, "expected an integer, got '" + v + "'");
    out = x;
  }

  template <class U>
  void unsigned_integer(const std::string& key, U& out) {
    if (!has(key)) return;
    const std::string v = raw(key);
    std::uint64_t x = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
      bad(key, "expected a non-negative integer, got '" + v + "'");
    out = static_cast<U>(x);
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const std::string v = raw(key);
    if (v == "true") out = true;
    else if (v == "false") out = false;
    else bad(key, "expected true or false, got '" + v + "'");
  }

  void list(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    out.clear();
    const std::string v = raw(key);
    if (v.empty()) return;
    for (const auto& c : split(v, ',')) out.push_back(to_double(key, c));
  }

  void matrix(const std::string& key, std::vector<std::vector<double>>& out) {
    if (!has(key)) return;
    out.clear();
    for (const auto& row : split(raw(key), ';')) {
      std::vector<double> r;
      for (const auto& c : split(row, ',')) r.push_back(to_double(key, c));
      out.push_back(r);
    }
  }

  void points(const std::string& key, int dim, std::map<IVec, double>& out) {
    if (!has(key)) return;
    out.clear();
    const std::string v = raw(key);
    if (v.empty()) return;
    for (const auto& item : split(v, ';')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) bad(key, "expected entries 'i1,i2:value' separated by ';'");
      const auto coords = split(parts[0], ',');
      if (static_cast<int>(coords.size()) != dim) bad(key, "entry '" + item + "' needs " + std::to_string(dim) + " coordinates");
      IVec k{};
      for (int a = 0; a < dim; ++a) {
        const auto& c = coords[static_cast<std::size_t>(a)];
        std::int64_t x = 0;
        const auto r = std::from_chars(c.data(), c.data() + c.size(), x);
        if (r.ec != std::errc() || r.ptr != c.data() + c.size()) bad(key, "coordinate '" + c + "' is not an integer");
        k[a] = x;
      }
      if (out.count(k)) bad(key, "duplicate entry '" + parts[0] + "'");
      out[k] = to_double(key, parts[1]);
    }
  }

  /// Rejects keys outside `known` and keys in `known` but not in `allowed`.
  void finish(const std::set<std::string>& known, const std::set<std::string>& allowed, const std::string& kind) const {
    for (const auto& [k, v] : values_) {
      if (!known.count(k)) fail(ErrorKind::validation, "unknown key " + field(k));
      if (!allowed.count(k)) fail(ErrorKind::validation, "key " + field(k) + " does not apply to kind '" + kind + "'");
    }
  }

 private:
  double to_double(const std::string& key, const std::string& v) const {
    double x = 0.0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
    if (v.empty() || r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(x))
      bad(key, "expected a number, got '" + v + "'");
    return x;
  }

  std::string name_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

const std::set<std::string> kModelKeys = {"kind",     "dim",     "scale",      "override",   "beta",      "c0",
                                          "log_power", "amplitude", "balanced", "rows",       "exponents", "delta",
                                          "directions", "widths",  "b_scale",    "b_power",    "b_values",  "entries",
                                          "table_file"};
const std::set<std::string> kRegionKeys = {"kind", "dim",       "radius", "semi_axes", "radii",
                                           "r0",   "amplitude", "lobes",  "directions"};
const std::set<std::string> kExperimentKeys = {"command",     "lambda_grid",   "rho",          "t_n",
                                               "innovation",  "replicates",    "base_seed",    "output",
                                               "max_exact",   "theta_method",  "limit_method", "limit_samples",
                                               "limit_rel_tol", "histogram_bins"};

std::set<std::string> model_allowed(const std::string& kind) {
  std::set<std::string> k = {"kind", "dim", "scale", "override"};
  if (kind == "isotropic") k.insert({"beta", "c0", "log_power", "amplitude", "balanced"});
  else if (kind == "anisotropic-orthant") k.insert({"rows", "exponents", "delta"});
  else if (kind == "directional-cones") k.insert({"directions", "widths", "exponents"});
  else if (kind == "separable-nd") k.insert({"b_scale", "b_power", "b_values"});
  else if (kind == "table") k.insert({"entries", "table_file"});
  else if (kind != "delta") fail(ErrorKind::validation, "[model] kind: unknown model kind '" + kind + "'");
  return k;
}

std::set<std::string> region_allowed(const std::string& kind) {
  if (kind == "cube") return {"kind", "dim"};
  if (kind == "ball") return {"kind", "dim", "radius"};
  if (kind == "ellipsoid") return {"kind", "semi_axes"};
  if (kind == "polar-star") return {"kind", "radii"};
  if (kind == "polar-star-lobed") return {"kind", "r0", "amplitude", "lobes", "directions"};
  fail(ErrorKind::validation, "[region] kind: unknown region kind '" + kind + "'");
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

std::string join_matrix(const std::vector<std::vector<double>>& m) {
  std::string s;
  for (std::size_t i = 0; i < m.size(); ++i) s += (i ? ";" : "") + join(m[i]);
  return s;
}

std::string join_points(const std::map<IVec, double>& entries, int dim) {
  std::string s;
  bool first = true;
  for (const auto& [k, v] : entries) {
    if (!first) s += ";";
    first = false;
    for (int a = 0; a < dim; ++a) s += (a ? "," : "") + std::to_string(k[a]);
    s += ":" + num(v);
  }
  return s;
}

const char* theta_method_name(ThetaMethod m) { return m == ThetaMethod::fft ? "fft" : "direct"; }

}  // namespace

const char* command_name(Command command) {
  switch (command) {
    case Command::scan: return "scan";
    case Command::decompose: return "decompose";
    case Command::limits: return "limits";
    case Command::mc: return "mc";
    case Command::report: return "report";
  }
  return "report";
}

Command parse_command(const std::string& name) {
  for (Command c : {Command::scan, Command::decompose, Command::limits, Command::mc, Command::report})
    if (name == command_name(c)) return c;
  fail(ErrorKind::validation, "unknown command '" + name + "': expected scan, decompose, limits, mc or report");
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream is(text);
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    fail(ErrorKind::validation, std::string("config syntax: ") + e.what());
  }
  std::map<std::string, std::map<std::string, std::string>> sections;
  for (const auto& [name, node] : tree) {
    if (node.empty()) fail(ErrorKind::validation, "config key '" + name + "' is outside a section");
    if (name != "model" && name != "region" && name != "experiment")
      fail(ErrorKind::validation, "unknown config section [" + name + "]");
    for (const auto& [key, leaf] : node) sections[name][key] = trim(leaf.data());
  }
  RunConfig c;
  Section model("model", sections["model"]);
  Section region("region", sections["region"]);
  Section exp("experiment", sections["experiment"]);

  ModelConfig& m = c.model;
  model.text("kind", m.kind);
  model.finish(kModelKeys, model_allowed(m.kind), m.kind);
  model.integer("dim", m.dim);
  if (m.dim < 1 || m.dim > kMaxDim) model.bad("dim", "must be 1, 2 or 3");
  model.real("scale", m.scale);
  model.points("override", m.dim, m.override_values);
  model.real("beta", m.beta);
  model.real("c0", m.c0);
  model.real("log_power", m.log_power);
  model.text("amplitude", m.amplitude);
  if (m.amplitude != "constant" && m.amplitude != "pure-power")
    model.bad("amplitude", "expected constant or pure-power, got '" + m.amplitude + "'");
  model.boolean("balanced", m.balanced);
  model.matrix("rows", m.rows);
  model.list("exponents", m.exponents);
  model.real("delta", m.delta);
  model.matrix("directions", m.directions);
  model.list("widths", m.widths);
  model.real("b_scale", m.b_scale);
  model.real("b_power", m.b_power);
  model.list("b_values", m.b_values);
  model.points("entries", m.dim, m.entries);
  if (model.has("table_file")) {
    if (model.has("entries")) model.bad("table_file", "give either entries or table_file, not both");
    std::filesystem::path p = model.raw("table_file");
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    std::ifstream in(p);
    if (!in) fail(ErrorKind::io, "cannot read table file " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    m.entries = read_table_csv(ss.str(), m.dim);
  }
  if (m.kind == "table" && m.entries.empty()) model.bad("entries", "table model needs entries or table_file");
  if (m.kind == "separable-nd" && m.dim != 2) model.bad("dim", "separable-nd is defined for d = 2");

  RegionConfig& r = c.region;
  region.text("kind", r.kind);
  region.finish(kRegionKeys, region_allowed(r.kind), r.kind);
  region.integer("dim", r.dim);
  region.real("radius", r.radius);
  region.list("semi_axes", r.semi_axes);
  region.list("radii", r.radii);
  region.real("r0", r.r0);
  region.real("amplitude", r.amplitude);
  region.integer("lobes", r.lobes);
  region.integer("directions", r.directions);
  if (r.kind == "ellipsoid") r.dim = static_cast<int>(r.semi_axes.size());
  if (r.kind == "polar-star" || r.kind == "polar-star-lobed") r.dim = 2;
  if (r.dim != m.dim) fail(ErrorKind::validation, "[region] dim: region dimension differs from [model] dim");

  exp.finish(kExperimentKeys, kExperimentKeys, "experiment");
  if (exp.has("command")) c.command = parse_command(exp.raw("command"));
  if (!exp.has("lambda_grid")) exp.bad("lambda_grid", "required");
  exp.list("lambda_grid", c.lambda_grid);
  if (c.lambda_grid.empty()) exp.bad("lambda_grid", "must list at least one value");
  for (std::size_t k = 0; k < c.lambda_grid.size(); ++k) {
    if (!(c.lambda_grid[k] >= 1.0)) exp.bad("lambda_grid", "values must be at least 1");
    if (k > 0 && !(c.lambda_grid[k] > c.lambda_grid[k - 1])) exp.bad("lambda_grid", "must be strictly increasing");
  }
  exp.real("rho", c.rho);
  if (!(c.rho >= 2.0)) exp.bad("rho", "must be at least 2");
  if (exp.has("t_n")) c.t_n = parse_tn_spec(exp.raw("t_n"));
  if (exp.has("innovation")) c.innovation = parse_innovation(exp.raw("innovation"));
  exp.unsigned_integer("replicates", c.replicates);
  if (c.command == Command::mc && c.replicates < 100) exp.bad("replicates", "mc needs at least 100 replicates");
  if (c.replicates != 0 && c.replicates < 100) exp.bad("replicates", "must be 0 or at least 100");
  exp.unsigned_integer("base_seed", c.base_seed);
  exp.text("output", c.output);
  if (c.output.empty()) exp.bad("output", "must not be empty");
  exp.unsigned_integer("max_exact", c.max_exact);
  if (exp.has("theta_method")) {
    const std::string v = exp.raw("theta_method");
    if (v == "fft") c.theta_method = ThetaMethod::fft;
    else if (v == "direct") c.theta_method = ThetaMethod::direct;
    else exp.bad("theta_method", "expected fft or direct, got '" + v + "'");
  }
  if (exp.has("limit_method")) {
    const std::string v = exp.raw("limit_method");
    if (v == limit_method_name(LimitMethod::quadrature)) c.limit_method = LimitMethod::quadrature;
    else if (v == limit_method_name(LimitMethod::monte_carlo_integration))
      c.limit_method = LimitMethod::monte_carlo_integration;
    else exp.bad("limit_method", "expected quadrature or monte-carlo-integration, got '" + v + "'");
  }
  exp.unsigned_integer("limit_samples", c.limit_samples);
  if (c.limit_samples < 2) exp.bad("limit_samples", "must be at least 2");
  exp.real("limit_rel_tol", c.limit_rel_tol);
  if (!(c.limit_rel_tol > 0 && c.limit_rel_tol < 1)) exp.bad("limit_rel_tol", "must be in (0, 1)");
  exp.unsigned_integer("histogram_bins", c.histogram_bins);
  if (c.histogram_bins == 0) exp.bad("histogram_bins", "must be positive");

  try {
    (void)build_model(c.model);
  } catch (const Error& e) {
    fail(ErrorKind::validation, std::string("[model] ") + e.what());
  }
  try {
    (void)build_region(c.region);
  } catch (const Error& e) {
    fail(ErrorKind::validation, std::string("[region] ") + e.what());
  }
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream os;
  const ModelConfig& m = c.model;
  os << "[model]\n";
  os << "kind = " << m.kind << "\n";
  os << "dim = " << m.dim << "\n";
  os << "scale = " << num(m.scale) << "\n";
  if (!m.override_values.empty()) os << "override = " << join_points(m.override_values, m.dim) << "\n";
  if (m.kind == "isotropic") {
    os << "beta = " << num(m.beta) << "\n";
    os << "c0 = " << num(m.c0) << "\n";
    os << "log_power = " << num(m.log_power) << "\n";
    os << "amplitude = " << m.amplitude << "\n";
    os << "balanced = " << (m.balanced ? "true" : "false") << "\n";
  } else if (m.kind == "anisotropic-orthant") {
    os << "rows = " << join_matrix(m.rows) << "\n";
    os << "exponents = " << join(m.exponents) << "\n";
    os << "delta = " << num(m.delta) << "\n";
  } else if (m.kind == "directional-cones") {
    os << "directions = " << join_matrix(m.directions) << "\n";
    os << "widths = " << join(m.widths) << "\n";
    os << "exponents = " << join(m.exponents) << "\n";
  } else if (m.kind == "separable-nd") {
    os << "b_scale = " << num(m.b_scale) << "\n";
    os << "b_power = " << num(m.b_power) << "\n";
    if (!m.b_values.empty()) os << "b_values = " << join(m.b_values) << "\n";
  } else if (m.kind == "table") {
    os << "entries = " << join_points(m.entries, m.dim) << "\n";
  }
  const RegionConfig& r = c.region;
  os << "\n[region]\n";
  os << "kind = " << r.kind << "\n";
  if (r.kind == "cube" || r.kind == "ball") os << "dim = " << r.dim << "\n";
  if (r.kind == "ball") os << "radius = " << num(r.radius) << "\n";
  if (r.kind == "ellipsoid") os << "semi_axes = " << join(r.semi_axes) << "\n";
  if (r.kind == "polar-star") os << "radii = " << join(r.radii) << "\n";
  if (r.kind == "polar-star-lobed") {
    os << "r0 = " << num(r.r0) << "\n";
    os << "amplitude = " << num(r.amplitude) << "\n";
    os << "lobes = " << r.lobes << "\n";
    os << "directions = " << r.directions << "\n";
  }
  os << "\n[experiment]\n";
  os << "command = " << command_name(c.command) << "\n";
  os << "lambda_grid = " << join(c.lambda_grid) << "\n";
  os << "rho = " << num(c.rho) << "\n";
  os << "t_n = " << tn_spec_string(c.t_n) << "\n";
  os << "innovation = " << innovation_name(c.innovation) << "\n";
  os << "replicates = " << c.replicates << "\n";
  os << "base_seed = " << c.base_seed << "\n";
  os << "output = " << c.output << "\n";
  os << "max_exact = " << c.max_exact << "\n";
  os << "theta_method = " << theta_method_name(c.theta_method) << "\n";
  os << "limit_method = " << limit_method_name(c.limit_method) << "\n";
  os << "limit_samples = " << c.limit_samples << "\n";
  os << "limit_rel_tol = " << num(c.limit_rel_tol) << "\n";
  os << "histogram_bins = " << c.histogram_bins << "\n";
  return os.str();
}

CoefficientModel build_model(const ModelConfig& m) {
  auto finish = [&](CoefficientModel model) {
    if (!m.override_values.empty()) model = model.with_override(m.override_values);
    if (m.scale != 1.0) model = model.scaled(m.scale);
    return model;
  };
  if (m.kind == "isotropic") {
    IsotropicParams p;
    p.c0 = m.c0;
    p.log_power = m.log_power;
    p.amplitude = m.amplitude == "pure-power" ? IsotropicParams::Amplitude::pure_power
                                              : IsotropicParams::Amplitude::constant;
    CoefficientModel model = CoefficientModel::isotropic(m.dim, m.beta, p);
    if (m.balanced) model = model.balanced();
    return finish(model);
  }
  if (m.kind == "anisotropic-orthant") return finish(CoefficientModel::anisotropic_orthant(m.dim, {m.rows, m.exponents, m.delta}));
  if (m.kind == "directional-cones")
    return finish(CoefficientModel::directional_cones(m.dim, {m.directions, m.widths, m.exponents}));
  if (m.kind == "separable-nd") return finish(CoefficientModel::separable_nd({m.b_scale, m.b_power, m.b_values}));
  if (m.kind == "delta") return finish(CoefficientModel::delta(m.dim));
  if (m.kind == "table") return finish(CoefficientModel::table(m.dim, m.entries));
  fail(ErrorKind::validation, "unknown model kind '" + m.kind + "'");
}

RegionPrototype build_region(const RegionConfig& r) {
  if (r.kind == "cube") return RegionPrototype::cube(r.dim);
  if (r.kind == "ball") return RegionPrototype::ball(r.dim, r.radius);
  if (r.kind == "ellipsoid") return RegionPrototype::ellipsoid(r.semi_axes);
  if (r.kind == "polar-star") return RegionPrototype::polar_star(r.radii);
  if (r.kind == "polar-star-lobed") return RegionPrototype::polar_star_lobed(r.r0, r.amplitude, r.lobes, r.directions);
  fail(ErrorKind::validation, "unknown region kind '" + r.kind + "'");
}

ExperimentSettings build_settings(const RunConfig& c) {
  ExperimentSettings s;
  s.lambda_grid = c.lambda_grid;
  s.rho = c.rho;
  s.t_n = c.t_n;
  s.innovation.distribution = c.innovation;
  s.replicates = c.replicates;
  s.base_seed = c.base_seed;
  s.max_exact = c.max_exact;
  s.theta_method = c.theta_method;
  s.limit_options.method = c.limit_method;
  s.limit_options.samples = c.limit_samples;
  s.limit_options.rel_tol = c.limit_rel_tol;
  s.limit_options.seed = c.base_seed;
  return s;
}

}  // namespace slrd
