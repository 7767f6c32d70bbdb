#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "oscctl/sim.hpp"

namespace oscctl {

/// Runs f(0..count-1) on up to `threads` workers (0 = hardware concurrency).
/// Results are stored by index, so the output does not depend on scheduling.
/// The exception of the lowest failing index is rethrown after all workers join.
template <class F>
auto parallel_map(std::size_t count, std::size_t threads, F f)
    -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(count, 1));
  auto work = [&](std::size_t worker) {
    for (std::size_t i = worker; i < count; i += threads) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Uniform direction on the Euclidean sphere scaled so that rho equals `level`.
std::vector<PhaseState> sample_level_set(const OscillatorSystem& sys, double level,
                                         std::size_t count, std::uint64_t seed);

/// Integration settings shared by the study drivers.
struct StudyNumerics {
  double dt = 1e-2;
  double eps_sign = 1e-4;
  double t_max = 1e5;
  std::size_t threads = 0;
};

struct Stats {
  std::size_t count = 0;
  double mean = 0.0, min = 0.0, max = 0.0;
};
Stats summarize(const std::vector<double>& values);

struct RatioRow {
  double level = 0.0;
  std::size_t samples = 0;
  Stats rho_over_T;
  std::optional<Stats> T_over_tau;
  std::optional<Stats> tau_over_T;
  std::string note;
};

struct RatioStudyOptions {
  std::vector<double> levels;
  std::size_t samples_per_level = 8;
  std::uint64_t seed = 1;
  StudyNumerics numerics;
};

/// Closed-loop time against rho (and, for the unit oscillator, against the optimal time).
std::vector<RatioRow> ratio_study(const ControlDesign& design, const RatioStudyOptions& options);

struct DecayRun {
  PhaseState x0;
  double rho_start = 0.0;
  double rho_end = 0.0;
  double elapsed = 0.0;
  double rate = 0.0;  ///< (rho_start - rho_end) / elapsed
  Outcome outcome = Outcome::Stopped;
};

struct DecayOptions {
  double rho_start = 500.0;
  double rho_stop = 50.0;
  std::size_t starts = 20;
  std::uint64_t seed = 1;
  StudyNumerics numerics;
};

struct DecayReport {
  std::vector<DecayRun> runs;
  /// Share of runs that stopped at rho_stop with a rate inside [lo, hi].
  double fraction_within(double lo, double hi) const;
};

/// Amplitude-one basic control from random states on {rho = rho_start} until rho_stop.
DecayReport decay_study(const OscillatorSystem& sys, const DecayOptions& options);

struct StalledArc {
  PhaseState x0;
  PhaseState x_end;
  double rho_end = 0.0;
  double t_stall = 0.0;
  double f_max = 0.0;  ///< max |<p, AB>| / <rho'' B, B> over the last window
  std::size_t points = 0;
};

struct AttractorScanOptions {
  double rho_level = 1.0;
  std::size_t n_inits = 10;
  double horizon = 200.0;
  /// Stall once rho falls slower than this mean rate; the nominal rate is 1.
  double stall_rate = 0.05;
  double stall_window = 0.0;
  std::uint64_t seed = 1;
  /// A wider band: trajectories rest inside it, where the step is ~ eps |x|.
  StudyNumerics numerics{1e-2, 1e-2, 1e5, 0};
};

struct AttractorReport {
  std::size_t runs = 0;
  std::vector<StalledArc> stalled;
  std::size_t inconclusive = 0;  ///< horizon reached without stall or progress below rho_level/2
  std::optional<double> mu_hat;  ///< min over stalled arcs of f_max
  std::optional<double> radius;  ///< 1 / mu_hat
  std::vector<std::string> notes;
};

AttractorReport attractor_scan(const OscillatorSystem& sys, const AttractorScanOptions& options);

/// f = <p, AB> / <rho'' B, B> with rho'' B from central differences of the momentum.
double singular_control_magnitude(const OscillatorSystem& sys, const PhaseState& x);

struct ConvergenceCell {
  double dt = 0.0;
  double eps = 0.0;
  Outcome outcome = Outcome::Arrived;
  double total_time = 0.0;
  std::optional<PhaseState> probe;
};

struct CauchyPath {
  std::string name;
  std::vector<double> state_gaps;  ///< |probe_k - probe_{k+1}|
  std::vector<double> time_gaps;   ///< |T_k - T_{k+1}|
  bool cauchy = true;
};

struct ConvergenceOptions {
  std::vector<double> dt_list{2e-3, 1e-3, 5e-4};
  std::vector<double> eps_list{2e-4, 1e-4, 5e-5};
  double probe_time = 1.0;
  double floor = 1e-6;
  std::size_t threads = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceCell> cells;  ///< row-major over dt_list x eps_list
  std::vector<CauchyPath> paths;
  bool passed = false;
};

/// Each successive gap must halve or fall below the floor.
bool is_cauchy(const std::vector<double>& gaps, double floor);

ConvergenceReport convergence_study(const Scenario& scenario, const ConvergenceOptions& options);

}  // namespace oscctl
