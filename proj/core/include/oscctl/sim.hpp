#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oscctl/zones.hpp"

namespace oscctl {

struct Monitors {
  bool rho = true;            ///< rho nonincreasing in stages 1-2 (hard)
  bool control_bound = true;  ///< |u| <= 1 (hard; the applied control saturates)
  bool strip = true;          ///< |Cx| <= 1/2 in stage 3 (soft)
  bool time_to_go = true;     ///< T_frak decreases at unit rate in stage 3 (soft)
  bool energy = false;        ///< energy balance between switches in stage 1 (soft)
  bool hamiltonian = false;   ///< <Ax, p> ~ 0 (soft)
};

enum class HorizonPolicy { Throw, Return };

struct Scenario {
  Scenario(ControlDesign d, PhaseState start) : design(std::move(d)), x0(std::move(start)) {}

  ControlDesign design;
  PhaseState x0;
  double dt = 1e-3;
  double eps_sign = 1e-4;     ///< half-width of the regularized sign on <p, B>
  double t_max = 1e4;
  Monitors monitors;
  double stall_window = 0.0;  ///< <= 0 selects 20 pi / min omega
  double stall_tol = 1e-4;
  double arrival_factor = 1e-6;        ///< arrival once T_frak <= factor * theta
  double terminal_step_fraction = 0.05;
  std::optional<double> stop_rho;      ///< end the run once rho falls to this level
  bool freeze_stage = false;           ///< keep the initial stage (attractor scans)
  std::vector<double> probe_times;     ///< steps are cut to land on these times
  std::size_t sample_stride = 1;
  std::size_t max_steps = 50'000'000;
  HorizonPolicy on_horizon = HorizonPolicy::Throw;

  void validate() const;
};

enum class EventKind { StageSwitch, SignSwitch, Arrival, Stall, MonitorViolation, Warning, Stop };
const char* to_string(EventKind k);

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::Warning;
  std::string detail;
};

struct Sample {
  double t = 0.0;
  PhaseState x;
  double u = 0.0;
  Stage stage = Stage::High;
  double rho = 0.0;
  std::optional<double> T_frak;
};

enum class Outcome { Arrived, Stalled, Stopped, HorizonReached };
const char* to_string(Outcome o);

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<Event> events;
  std::vector<std::pair<double, PhaseState>> probes;
  double total_time = 0.0;  ///< includes the analytic remainder at arrival
  Outcome outcome = Outcome::HorizonReached;
  std::size_t steps = 0;
  std::size_t hard_violations = 0;
  std::size_t soft_violations = 0;
  std::optional<double> stage_entry[4];  ///< first time each stage was active
};

/// Integrates x' = Ax + Bu under the staged feedback.
Trajectory simulate(const Scenario& scenario);

/// One switching of the n = 1 time-optimal control.
struct BangArc {
  double u = 0.0;
  double duration = 0.0;
};
struct OptimalSolution {
  double tau = 0.0;
  std::vector<BangArc> arcs;
};

/// Bang-bang synthesis for x'' + x = u, |u| <= 1 (switching curve of unit semicircles).
OptimalSolution optimal_control_n1(const PhaseState& x, double tol = 1e-12);
/// Minimum time to the origin; throws NotToyCase unless n = 1 and omega = 1.
double optimal_time_n1(const OscillatorSystem& sys, const PhaseState& x, double tol = 1e-12);
/// Feedback value of the synthesis at a state.
double optimal_feedback_n1(const PhaseState& x, double tol = 1e-12);

}  // namespace oscctl
