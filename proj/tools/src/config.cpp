#include "oscctl_cli/config.hpp"

#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "oscctl/errors.hpp"
#include "oscctl/export.hpp"

namespace oscctl::cli {

namespace pt = boost::property_tree;

const char* to_string(Command c) {
  switch (c) {
    case Command::Simulate: return "simulate";
    case Command::RatioStudy: return "ratio-study";
    case Command::AttractorScan: return "attractor-scan";
    case Command::Tables: return "tables";
    case Command::Verify: return "verify";
    case Command::Toy: return "toy";
    case Command::Convergence: return "convergence";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  for (Command c : {Command::Simulate, Command::RatioStudy, Command::AttractorScan,
                    Command::Tables, Command::Verify, Command::Toy, Command::Convergence})
    if (s == to_string(c)) return c;
  throw ParseError("unknown command '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) throw ParseError("not a number: '" + text + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!t.empty() && t[0] != '-') v = std::stoull(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != t.size()) throw ParseError("not a nonnegative integer: '" + text + "'");
  return v;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(parse_double(item));
  return out;
}

std::string show_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

std::string show_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : "auto";
}

std::optional<double> parse_optional(const std::string& text) {
  if (trim(text) == "auto") return std::nullopt;
  return parse_double(text);
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define OSCCTL_DOUBLE(sec, name, member)                                           \
  Field{sec, name, [](const RunConfig& c) { return format_double(c.member); },    \
        [](RunConfig& c, const std::string& v) { c.member = parse_double(v); }}
#define OSCCTL_COUNT(sec, name, member)                                            \
  Field{sec, name, [](const RunConfig& c) { return std::to_string(c.member); },   \
        [](RunConfig& c, const std::string& v) { c.member = parse_unsigned(v); }}
#define OSCCTL_LIST(sec, name, member)                                             \
  Field{sec, name, [](const RunConfig& c) { return show_list(c.member); },        \
        [](RunConfig& c, const std::string& v) { c.member = parse_list(v); }}
#define OSCCTL_OPTIONAL(sec, name, member)                                         \
  Field{sec, name, [](const RunConfig& c) { return show_optional(c.member); },    \
        [](RunConfig& c, const std::string& v) { c.member = parse_optional(v); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"run", "command", [](const RunConfig& c) { return std::string(to_string(c.command)); },
            [](RunConfig& c, const std::string& v) { c.command = command_from_string(trim(v)); }},
      OSCCTL_COUNT("run", "seed", seed),
      Field{"run", "output_dir", [](const RunConfig& c) { return c.output_dir; },
            [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); }},
      OSCCTL_LIST("system", "omega", omega),
      OSCCTL_LIST("system", "x0", x0),
      OSCCTL_OPTIONAL("plan", "r_switch", r_switch),
      Field{"plan", "r_switch_kind",
            [](const RunConfig& c) { return std::string(oscctl::to_string(c.r_switch_kind)); },
            [](RunConfig& c, const std::string& v) {
              try {
                c.r_switch_kind = radius_kind_from_string(trim(v));
              } catch (const ValidationError& e) {
                throw ParseError(e.what());
              }
            }},
      OSCCTL_OPTIONAL("plan", "theta", theta),
      OSCCTL_OPTIONAL("plan", "U", U),
      OSCCTL_OPTIONAL("plan", "kappa2", kappa2),
      OSCCTL_DOUBLE("numerics", "dt", dt),
      OSCCTL_DOUBLE("numerics", "eps_sign", eps_sign),
      OSCCTL_DOUBLE("numerics", "t_max", t_max),
      OSCCTL_DOUBLE("numerics", "arrival_factor", arrival_factor),
      OSCCTL_DOUBLE("numerics", "terminal_step_fraction", terminal_step_fraction),
      OSCCTL_DOUBLE("numerics", "stall_tol", stall_tol),
      OSCCTL_COUNT("numerics", "sample_stride", sample_stride),
      OSCCTL_COUNT("numerics", "threads", threads),
      OSCCTL_LIST("ratio", "levels", levels),
      OSCCTL_COUNT("ratio", "samples_per_level", samples_per_level),
      OSCCTL_DOUBLE("ratio", "dt", study_dt),
      OSCCTL_DOUBLE("ratio", "eps_sign", study_eps),
      OSCCTL_DOUBLE("scan", "rho_level", scan_rho_level),
      OSCCTL_COUNT("scan", "n_inits", scan_inits),
      OSCCTL_DOUBLE("scan", "horizon", scan_horizon),
      OSCCTL_DOUBLE("scan", "stall_rate", scan_stall_rate),
      OSCCTL_DOUBLE("scan", "dt", scan_dt),
      OSCCTL_DOUBLE("scan", "eps_sign", scan_eps),
      OSCCTL_LIST("convergence", "dt_list", dt_list),
      OSCCTL_LIST("convergence", "eps_list", eps_list),
      OSCCTL_DOUBLE("convergence", "probe_time", probe_time),
      OSCCTL_COUNT("tables", "dim", table_dim),
      OSCCTL_COUNT("quadrature", "monte_carlo_samples", monte_carlo_samples),
      OSCCTL_DOUBLE("quadrature", "bessel_max_cutoff", bessel_max_cutoff),
  };
  return table;
}

#undef OSCCTL_DOUBLE
#undef OSCCTL_COUNT
#undef OSCCTL_LIST
#undef OSCCTL_OPTIONAL

const Field& find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields())
    if (section == f.section && key == f.key) return f;
  throw ParseError("unknown field '" + section + "." + key + "'");
}

void set_field(RunConfig& config, const std::string& section, const std::string& key,
               const std::string& value) {
  const Field& f = find_field(section, key);
  try {
    f.set(config, value);
  } catch (const ParseError& e) {
    throw ParseError("field '" + section + "." + key + "': " + e.what());
  }
}

RunConfig from_ptree(const pt::ptree& tree, RunConfig config) {
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ParseError("key '" + section + "' must sit inside a [section]");
    for (const auto& [key, value] : body) set_field(config, section, key, value.data());
  }
  return config;
}

}  // namespace

RunConfig default_config(Command command) {
  RunConfig c;
  c.command = command;
  if (command == Command::Toy) {
    c.omega = {1.0};
    c.x0 = {10.0, 0.0};
    c.r_switch = 2.0;
    c.r_switch_kind = RadiusKind::Euclidean;
  }
  return c;
}

RunConfig read_config_file(const std::string& path, RunConfig base) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.filename() + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return from_ptree(tree, std::move(base));
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  return from_ptree(tree, std::move(base));
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ParseError("override '" + assignment + "' lacks '='");
  const std::string path = trim(assignment.substr(0, eq));
  const auto dot = path.find('.');
  if (dot == std::string::npos)
    throw ParseError("override key '" + path + "' must be section.key");
  set_field(config, path.substr(0, dot), path.substr(dot + 1), assignment.substr(eq + 1));
}

std::string serialize(const RunConfig& config) {
  pt::ptree tree;
  for (const auto& f : fields()) tree.put(pt::ptree::path_type(std::string(f.section) + "/" + f.key, '/'), f.get(config));
  std::ostringstream out;
  pt::write_ini(out, tree);
  return out.str();
}

std::map<std::string, std::map<std::string, std::string>> config_fields(const RunConfig& config) {
  std::map<std::string, std::map<std::string, std::string>> out;
  for (const auto& f : fields()) out[f.section][f.key] = f.get(config);
  return out;
}

void validate(const RunConfig& c) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ValidationError(std::string("field '") + name + "' must be positive");
  };
  make_system(c);
  if (c.x0.size() != 2 * c.omega.size())
    throw ValidationError("field 'system.x0' needs " + std::to_string(2 * c.omega.size()) +
                          " entries (x_i, y_i per oscillator)");
  positive(c.dt, "numerics.dt");
  positive(c.eps_sign, "numerics.eps_sign");
  positive(c.t_max, "numerics.t_max");
  positive(c.arrival_factor, "numerics.arrival_factor");
  if (!(c.terminal_step_fraction > 0.0 && c.terminal_step_fraction <= 1.0))
    throw ValidationError("field 'numerics.terminal_step_fraction' must lie in (0, 1]");
  if (c.sample_stride == 0) throw ValidationError("field 'numerics.sample_stride' must be >= 1");
  if (c.r_switch) positive(*c.r_switch, "plan.r_switch");
  if (c.theta) positive(*c.theta, "plan.theta");
  if (c.U && !(*c.U > 0.0 && *c.U <= 1.0)) throw ValidationError("field 'plan.U' must lie in (0, 1]");
  if (c.kappa2 && !(*c.kappa2 > 0.0 && *c.kappa2 < 1.0))
    throw ValidationError("field 'plan.kappa2' must lie in (0, 1)");
  positive(c.study_dt, "ratio.dt");
  positive(c.study_eps, "ratio.eps_sign");
  positive(c.scan_dt, "scan.dt");
  positive(c.scan_eps, "scan.eps_sign");
  for (double v : c.dt_list) positive(v, "convergence.dt_list");
  for (double v : c.eps_list) positive(v, "convergence.eps_list");
  if (c.table_dim < 2 || c.table_dim % 2 != 0 || c.table_dim > 2 * kMaxCanonicalOscillators)
    throw ValidationError("field 'tables.dim' must be even and between 2 and " +
                          std::to_string(2 * kMaxCanonicalOscillators));
  positive(c.bessel_max_cutoff, "quadrature.bessel_max_cutoff");
}

OscillatorSystem make_system(const RunConfig& c) {
  if (c.omega.empty()) throw ValidationError("field 'system.omega' is empty");
  try {
    return OscillatorSystem(c.omega);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("field 'system.omega': ") + e.what());
  }
}

ControlDesign make_run_design(const RunConfig& c) {
  PlanOptions opt;
  opt.r_switch = c.r_switch;
  opt.r_switch_kind = c.r_switch_kind;
  opt.theta = c.theta;
  opt.U = c.U;
  opt.kappa2 = c.kappa2;
  return make_design(make_system(c), opt);
}

Scenario make_scenario(const RunConfig& c) {
  PhaseState x0(static_cast<Eigen::Index>(c.x0.size()));
  for (std::size_t i = 0; i < c.x0.size(); ++i) x0(static_cast<Eigen::Index>(i)) = c.x0[i];
  Scenario sc(make_run_design(c), x0);
  sc.dt = c.dt;
  sc.eps_sign = c.eps_sign;
  sc.t_max = c.t_max;
  sc.arrival_factor = c.arrival_factor;
  sc.terminal_step_fraction = c.terminal_step_fraction;
  sc.stall_tol = c.stall_tol;
  sc.sample_stride = c.sample_stride;
  return sc;
}

QuadratureBudget make_budget(const RunConfig& c) {
  QuadratureBudget b;
  b.monte_carlo_samples = c.monte_carlo_samples;
  b.monte_carlo_seed = c.seed;
  b.bessel_max_cutoff = c.bessel_max_cutoff;
  return b;
}

}  // namespace oscctl::cli
