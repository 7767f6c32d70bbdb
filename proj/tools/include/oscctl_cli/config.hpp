#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "oscctl/geometry.hpp"
#include "oscctl/sim.hpp"
#include "oscctl/studies.hpp"
#include "oscctl/zones.hpp"

namespace oscctl::cli {

enum class Command { Simulate, RatioStudy, AttractorScan, Tables, Verify, Toy, Convergence };
const char* to_string(Command c);
Command command_from_string(const std::string& s);

/// Everything a run needs; serialized as `[section]` / `key = value` text.
struct RunConfig {
  Command command = Command::Simulate;
  std::uint64_t seed = 1;
  std::string output_dir = "oscctl-out";

  std::vector<double> omega{1.0};
  std::vector<double> x0{10.0, 0.0};

  std::optional<double> r_switch;
  RadiusKind r_switch_kind = RadiusKind::Euclidean;
  std::optional<double> theta;
  std::optional<double> U;
  std::optional<double> kappa2;

  double dt = 1e-3;
  double eps_sign = 1e-4;
  double t_max = 1e4;
  double arrival_factor = 1e-6;
  double terminal_step_fraction = 0.05;
  double stall_tol = 1e-4;
  std::size_t sample_stride = 1;
  std::size_t threads = 0;

  std::vector<double> levels{50.0, 200.0, 800.0};
  std::size_t samples_per_level = 8;
  double study_dt = 1e-2;
  double study_eps = 1e-4;

  double scan_rho_level = 3.0;
  std::size_t scan_inits = 10;
  double scan_horizon = 200.0;
  double scan_stall_rate = 0.05;
  double scan_dt = 1e-2;
  double scan_eps = 1e-2;

  std::vector<double> dt_list{2e-3, 1e-3, 5e-4};
  std::vector<double> eps_list{2e-4, 1e-4, 5e-5};
  double probe_time = 1.0;

  std::size_t table_dim = 4;

  std::size_t monte_carlo_samples = 10'000'000;
  double bessel_max_cutoff = 1e8;

  bool operator==(const RunConfig&) const = default;
};

/// Defaults for a command; `toy` selects one unit oscillator from (10, 0) with r_switch = 2.
RunConfig default_config(Command command);

/// Reads `path` on top of `base`. Throws ParseError naming the line or field.
RunConfig read_config_file(const std::string& path, RunConfig base);
RunConfig parse_config_text(const std::string& text, RunConfig base);
/// `section.key=value`. Throws ParseError for unknown fields or bad values.
void apply_override(RunConfig& config, const std::string& assignment);
std::string serialize(const RunConfig& config);

/// Throws ValidationError naming the offending field.
void validate(const RunConfig& config);

/// Flat view used for summaries: section -> key -> text.
std::map<std::string, std::map<std::string, std::string>> config_fields(const RunConfig& config);

OscillatorSystem make_system(const RunConfig& config);
ControlDesign make_run_design(const RunConfig& config);
Scenario make_scenario(const RunConfig& config);
QuadratureBudget make_budget(const RunConfig& config);

}  // namespace oscctl::cli
