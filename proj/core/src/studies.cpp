#include "oscctl/studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "oscctl/errors.hpp"
#include "oscctl/momentum.hpp"

namespace oscctl {

namespace {

// Per-level seeds stay apart without depending on the level value itself.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return seed + 0x9E3779B97F4A7C15ULL * (index + 1);
}

Scenario base_scenario(const ControlDesign& design, const PhaseState& x0, const StudyNumerics& num) {
  Scenario sc(design, x0);
  sc.dt = num.dt;
  sc.eps_sign = num.eps_sign;
  sc.t_max = num.t_max;
  sc.sample_stride = 1000;
  return sc;
}

// Design whose thresholds never fire: the stage is frozen at High anyway.
ControlDesign high_only_design(const OscillatorSystem& sys) { return make_design(sys); }

}  // namespace

std::vector<PhaseState> sample_level_set(const OscillatorSystem& sys, double level,
                                         std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<PhaseState> out;
  out.reserve(count);
  while (out.size() < count) {
    PhaseState d(sys.dim());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = normal(rng);
    const double n = d.norm();
    if (n == 0.0) continue;
    d /= n;
    if (level == 0.0) {
      out.push_back(PhaseState::Zero(sys.dim()));
      continue;
    }
    out.push_back(d * (level / rho_norm(sys, d)));
  }
  return out;
}

Stats summarize(const std::vector<double>& values) {
  Stats s;
  s.count = values.size();
  if (values.empty()) return s;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

std::vector<RatioRow> ratio_study(const ControlDesign& design, const RatioStudyOptions& options) {
  const OscillatorSystem& sys = design.sys;
  const bool oracle = sys.size() == 1 && sys.omega(0) == 1.0;
  std::vector<RatioRow> rows;
  for (std::size_t k = 0; k < options.levels.size(); ++k) {
    RatioRow row;
    row.level = options.levels[k];
    if (!(row.level > 0.0)) {
      row.note = "level must be positive; skipped";
      rows.push_back(row);
      continue;
    }
    const auto starts =
        sample_level_set(sys, row.level, options.samples_per_level, mix_seed(options.seed, k));
    struct Result {
      double T, tau;
    };
    const auto results = parallel_map(starts.size(), options.numerics.threads, [&](std::size_t i) {
      const Trajectory tr = simulate(base_scenario(design, starts[i], options.numerics));
      const double tau = oracle ? optimal_time_n1(sys, starts[i]) : 0.0;
      return Result{tr.total_time, tau};
    });
    std::vector<double> rho_T, T_tau, tau_T;
    for (const auto& r : results) {
      rho_T.push_back(row.level / r.T);
      if (oracle) {
        T_tau.push_back(r.T / r.tau);
        tau_T.push_back(r.tau / r.T);
      }
    }
    row.samples = results.size();
    row.rho_over_T = summarize(rho_T);
    if (oracle) {
      row.T_over_tau = summarize(T_tau);
      row.tau_over_T = summarize(tau_T);
    } else if (sys.size() == 1) {
      row.note = "optimal time oracle needs omega = 1";
    }
    rows.push_back(row);
  }
  return rows;
}

double DecayReport::fraction_within(double lo, double hi) const {
  if (runs.empty()) return 0.0;
  std::size_t good = 0;
  for (const auto& r : runs)
    if (r.outcome == Outcome::Stopped && r.rate >= lo && r.rate <= hi) ++good;
  return static_cast<double>(good) / static_cast<double>(runs.size());
}

DecayReport decay_study(const OscillatorSystem& sys, const DecayOptions& options) {
  if (!(options.rho_start > options.rho_stop && options.rho_stop > 0.0))
    throw ValidationError("decay study needs rho_start > rho_stop > 0");
  const ControlDesign design = high_only_design(sys);
  const auto starts = sample_level_set(sys, options.rho_start, options.starts, options.seed);
  DecayReport report;
  report.runs = parallel_map(starts.size(), options.numerics.threads, [&](std::size_t i) {
    Scenario sc = base_scenario(design, starts[i], options.numerics);
    sc.freeze_stage = true;
    sc.stop_rho = options.rho_stop;
    sc.on_horizon = HorizonPolicy::Return;
    sc.stall_tol = 0.0;
    const Trajectory tr = simulate(sc);
    DecayRun run;
    run.x0 = starts[i];
    run.rho_start = options.rho_start;
    run.rho_end = tr.samples.back().rho;
    run.elapsed = tr.total_time;
    run.rate = run.elapsed > 0.0 ? (run.rho_start - run.rho_end) / run.elapsed : 0.0;
    run.outcome = tr.outcome;
    return run;
  });
  return report;
}

double singular_control_magnitude(const OscillatorSystem& sys, const PhaseState& x) {
  const PhaseState B = sys.B();
  const PhaseState AB = sys.A() * B;
  const double delta = 1e-4 * x.norm();
  if (delta == 0.0) throw ZeroState("singular control undefined at the origin");
  const MomentumVector p = momentum_from_state(sys, x);
  const MomentumVector dp =
      (momentum_from_state(sys, x + delta * B) - momentum_from_state(sys, x - delta * B)) /
      (2.0 * delta);
  const double curvature = dp.dot(B);
  if (curvature == 0.0) return std::numeric_limits<double>::infinity();
  return p.dot(AB) / curvature;
}

AttractorReport attractor_scan(const OscillatorSystem& sys, const AttractorScanOptions& options) {
  AttractorReport report;
  if (!(options.horizon > 0.0) || options.n_inits == 0) {
    report.notes.push_back("empty scan: nothing to integrate");
    return report;
  }
  const ControlDesign design = high_only_design(sys);
  const auto starts = sample_level_set(sys, options.rho_level, options.n_inits, options.seed);
  struct Run {
    std::optional<StalledArc> arc;
    bool inconclusive = false;
    std::string note;
  };
  const auto runs = parallel_map(starts.size(), options.numerics.threads, [&](std::size_t i) {
    Scenario sc = base_scenario(design, starts[i], options.numerics);
    sc.t_max = options.horizon;
    sc.freeze_stage = true;
    sc.on_horizon = HorizonPolicy::Return;
    double window = options.stall_window;
    if (window <= 0.0)
      window = 20.0 * std::numbers::pi / *std::min_element(sys.omega().begin(), sys.omega().end());
    sc.stall_window = window;
    sc.stall_tol = options.stall_rate * window;
    sc.sample_stride = 10;
    const Trajectory tr = simulate(sc);
    Run run;
    if (tr.outcome != Outcome::Stalled) {
      run.inconclusive = true;
      return run;
    }
    // The stalled arc is the trailing stretch spent inside the sign band (|u| < 1).
    const double t0 = tr.total_time - window;
    std::vector<const Sample*> arc;
    for (auto it = tr.samples.rbegin(); it != tr.samples.rend(); ++it) {
      if (it->t < t0 || std::abs(it->u) >= 1.0) break;
      arc.push_back(&*it);
    }
    std::reverse(arc.begin(), arc.end());
    if (arc.empty()) arc.push_back(&tr.samples.back());
    const std::size_t stride = std::max<std::size_t>(1, arc.size() / 200);
    StalledArc out;
    out.x0 = starts[i];
    out.x_end = tr.samples.back().x;
    out.rho_end = tr.samples.back().rho;
    out.t_stall = tr.total_time;
    for (std::size_t k = 0; k < arc.size(); k += stride) {
      const PhaseState& x = arc[k]->x;
      // Stay off the hyperplanes e_i = 0 where the curvature may jump.
      const Eigen::VectorXd e = sys.energy(x);
      if (e.minCoeff() <= 1e-6 * x.norm()) continue;
      out.f_max = std::max(out.f_max, std::abs(singular_control_magnitude(sys, x)));
      ++out.points;
    }
    if (out.points == 0) {
      run.inconclusive = true;
      run.note = "stalled arc lies on an e_i = 0 hyperplane";
      return run;
    }
    run.arc = out;
    return run;
  });
  report.runs = runs.size();
  for (const auto& r : runs) {
    if (r.arc) report.stalled.push_back(*r.arc);
    if (r.inconclusive) ++report.inconclusive;
    if (!r.note.empty()) report.notes.push_back(r.note);
  }
  if (!report.stalled.empty()) {
    double mu = std::numeric_limits<double>::infinity();
    for (const auto& a : report.stalled) mu = std::min(mu, a.f_max);
    report.mu_hat = mu;
    if (mu > 0.0) report.radius = 1.0 / mu;
  }
  return report;
}

bool is_cauchy(const std::vector<double>& gaps, double floor) {
  for (std::size_t k = 1; k < gaps.size(); ++k)
    if (!(gaps[k] <= 0.5 * gaps[k - 1] || gaps[k] <= floor)) return false;
  return true;
}

ConvergenceReport convergence_study(const Scenario& scenario, const ConvergenceOptions& options) {
  const std::size_t nd = options.dt_list.size(), ne = options.eps_list.size();
  ConvergenceReport report;
  report.cells = parallel_map(nd * ne, options.threads, [&](std::size_t idx) {
    Scenario sc = scenario;
    sc.dt = options.dt_list[idx / ne];
    sc.eps_sign = options.eps_list[idx % ne];
    sc.probe_times = {options.probe_time};
    sc.sample_stride = 1000;
    const Trajectory tr = simulate(sc);
    ConvergenceCell cell;
    cell.dt = sc.dt;
    cell.eps = sc.eps_sign;
    cell.outcome = tr.outcome;
    cell.total_time = tr.total_time;
    if (!tr.probes.empty()) cell.probe = tr.probes.front().second;
    return cell;
  });

  auto path = [&](std::string name, const std::vector<std::size_t>& idx) {
    CauchyPath p;
    p.name = std::move(name);
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
      const auto& a = report.cells[idx[k]];
      const auto& b = report.cells[idx[k + 1]];
      p.time_gaps.push_back(std::abs(a.total_time - b.total_time));
      p.state_gaps.push_back(a.probe && b.probe ? (*a.probe - *b.probe).norm()
                                                : std::numeric_limits<double>::infinity());
    }
    p.cauchy = is_cauchy(p.time_gaps, options.floor) && is_cauchy(p.state_gaps, options.floor);
    for (double g : p.state_gaps)
      if (!std::isfinite(g)) p.cauchy = false;
    report.paths.push_back(p);
  };
  std::vector<std::size_t> diag, along_dt, along_eps;
  for (std::size_t k = 0; k < std::min(nd, ne); ++k) diag.push_back(k * ne + k);
  for (std::size_t i = 0; i < nd; ++i) along_dt.push_back(i * ne);
  for (std::size_t j = 0; j < ne; ++j) along_eps.push_back(j);
  path("diagonal", diag);
  path("dt at coarsest eps", along_dt);
  path("eps at coarsest dt", along_eps);

  report.passed = true;
  for (const auto& c : report.cells)
    if (c.outcome != Outcome::Arrived) report.passed = false;
  for (const auto& p : report.paths) report.passed = report.passed && p.cauchy;
  return report;
}

}  // namespace oscctl
