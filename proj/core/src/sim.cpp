#include "oscctl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "oscctl/errors.hpp"
#include "oscctl/momentum.hpp"

namespace oscctl {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::StageSwitch: return "stage-switch";
    case EventKind::SignSwitch: return "sign-switch";
    case EventKind::Arrival: return "arrival";
    case EventKind::Stall: return "stall";
    case EventKind::MonitorViolation: return "monitor-violation";
    case EventKind::Warning: return "warning";
    case EventKind::Stop: return "stop";
  }
  return "?";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Arrived: return "arrived";
    case Outcome::Stalled: return "stalled";
    case Outcome::Stopped: return "stopped";
    case Outcome::HorizonReached: return "horizon";
  }
  return "?";
}

void Scenario::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (!(eps_sign > 0.0) || !std::isfinite(eps_sign)) throw ValidationError("eps_sign must be positive");
  if (!(t_max > 0.0)) throw ValidationError("t_max must be positive");
  if (!(arrival_factor > 0.0)) throw ValidationError("arrival_factor must be positive");
  if (!(terminal_step_fraction > 0.0 && terminal_step_fraction <= 1.0))
    throw ValidationError("terminal_step_fraction must lie in (0, 1]");
  if (sample_stride == 0) throw ValidationError("sample_stride must be at least 1");
  design.sys.check_state(x0);
  if (!x0.allFinite()) throw ValidationError("x0 must be finite");
}

namespace {

// Which smooth branch of the regularized sign is active over a step.
enum class Regime { Minus, Band, Plus };

Regime regime_of(double sigma, double eps) {
  if (sigma > eps) return Regime::Minus;
  if (sigma < -eps) return Regime::Plus;
  return Regime::Band;
}

using ControlFn = std::function<double(const PhaseState&)>;

PhaseState rk4(const OscillatorSystem& sys, const PhaseState& x, double h, const ControlFn& u) {
  const PhaseState k1 = sys.field(x, u(x));
  const PhaseState x2 = x + 0.5 * h * k1;
  const PhaseState k2 = sys.field(x2, u(x2));
  const PhaseState x3 = x + 0.5 * h * k2;
  const PhaseState k3 = sys.field(x3, u(x3));
  const PhaseState x4 = x + h * k3;
  const PhaseState k4 = sys.field(x4, u(x4));
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

class Runner {
 public:
  explicit Runner(const Scenario& sc)
      : sc_(sc), d_(sc.design), sys_(sc.design.sys), dual_(sc.design.sys) {
    window_ = sc.stall_window > 0.0
                  ? sc.stall_window
                  : 20.0 * std::numbers::pi /
                        *std::min_element(sys_.omega().begin(), sys_.omega().end());
  }

  Trajectory run();

 private:
  double amplitude() const { return stage_ == Stage::High ? 1.0 : d_.plan.U; }

  double radius(const PhaseState& x, double rho) const {
    return d_.plan.r_switch_kind == RadiusKind::Euclidean ? x.norm() : rho;
  }

  double terminal_raw(const PhaseState& x, double guess) {
    if (x.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const Eigen::VectorXd xf = d_.transform.to_canonical(x);
    const double T = solve_time_scale(d_.terminal, xf, 1e-13, guess).T_frak;
    return d_.transform.C.dot(x) + d_.terminal.feedback(xf, T);
  }

  ControlFn regime_control(Regime r) {
    const double U = amplitude();
    switch (r) {
      case Regime::Minus: return [U](const PhaseState&) { return -U; };
      case Regime::Plus: return [U](const PhaseState&) { return U; };
      case Regime::Band: break;
    }
    const double eps = sc_.eps_sign;
    return [this, U, eps](const PhaseState& x) { return -U * regularized_sign(dual_.evaluate(x).sigma, eps); };
  }

  double band_step(const PhaseState& x) {
    const double delta = 1e-7 * std::max(x.norm(), 1e-12);
    const PhaseState B = sys_.B();
    const double dsig =
        (dual_.evaluate(x + delta * B).sigma - dual_.evaluate(x - delta * B).sigma) / (2 * delta);
    const double L = amplitude() * std::abs(dsig) / sc_.eps_sign;
    return L > 0.0 ? 1.0 / L : sc_.dt;
  }

  double step_limit() const {
    double h = std::min(sc_.dt, sc_.t_max - t_);
    if (next_probe_ < sc_.probe_times.size()) h = std::min(h, sc_.probe_times[next_probe_] - t_);
    return h;
  }

  void record(const PhaseState& x, double u, double rho, std::optional<double> T, bool force) {
    ++since_sample_;
    if (!force && since_sample_ < sc_.sample_stride) return;
    since_sample_ = 0;
    if (!traj_.samples.empty() && traj_.samples.back().t >= t_) return;
    traj_.samples.push_back(Sample{t_, x, u, stage_, rho, T});
  }

  void event(EventKind k, std::string detail) {
    traj_.events.push_back(Event{t_, k, std::move(detail)});
  }

  // Logs on entry into a violating state; counts every violating step.
  void monitor(bool ok, bool hard, bool& flag, const std::string& what) {
    if (ok) {
      flag = false;
      return;
    }
    (hard ? traj_.hard_violations : traj_.soft_violations)++;
    if (!flag) event(hard ? EventKind::MonitorViolation : EventKind::Warning, what);
    flag = true;
  }

  void enter_stage(Stage s) {
    event(EventKind::StageSwitch, std::string(to_string(stage_)) + "->" + to_string(s));
    stage_ = s;
    if (!traj_.stage_entry[static_cast<int>(s)]) traj_.stage_entry[static_cast<int>(s)] = t_;
  }

  void take_probe(const PhaseState& x) {
    while (next_probe_ < sc_.probe_times.size() &&
           sc_.probe_times[next_probe_] <= t_ + 1e-12 * std::max(1.0, t_)) {
      traj_.probes.emplace_back(sc_.probe_times[next_probe_], x);
      ++next_probe_;
    }
  }

  bool terminal_step();
  bool switching_step();

  const Scenario& sc_;
  const ControlDesign& d_;
  const OscillatorSystem& sys_;
  DualCache dual_;
  Trajectory traj_;

  double t_ = 0.0;
  PhaseState x_;
  Stage stage_ = Stage::High;
  std::optional<Regime> forced_;
  std::optional<Regime> last_saturated_;
  double T_cur_ = 0.0;
  double window_ = 0.0;
  double check_t_ = 0.0, check_rho_ = 0.0;
  std::size_t since_sample_ = 0;
  std::size_t next_probe_ = 0;
  bool bad_rho_ = false, bad_u_ = false, bad_strip_ = false, bad_slope_ = false;
  bool bad_energy_ = false, bad_ham_ = false;
};

Trajectory Runner::run() {
  x_ = sc_.x0;
  while (next_probe_ < sc_.probe_times.size() && sc_.probe_times[next_probe_] <= 0.0)
    traj_.probes.emplace_back(sc_.probe_times[next_probe_++], x_);

  if (x_.cwiseAbs().maxCoeff() == 0.0) {
    stage_ = Stage::Arrived;
    traj_.stage_entry[3] = 0.0;
    traj_.samples.push_back(Sample{0.0, x_, 0.0, stage_, 0.0, 0.0});
    event(EventKind::Arrival, "initial state is the origin");
    traj_.outcome = Outcome::Arrived;
    return std::move(traj_);
  }

  const auto s0 = dual_.evaluate(x_);
  stage_ = sc_.freeze_stage ? Stage::High : classify(d_, x_, Stage::High, s0.rho);
  traj_.stage_entry[static_cast<int>(stage_)] = 0.0;
  check_t_ = 0.0;
  check_rho_ = s0.rho;
  if (stage_ == Stage::Terminal) {
    T_cur_ = solve_time_scale(d_.terminal, d_.transform.to_canonical(x_)).T_frak;
    const double raw = terminal_raw(x_, T_cur_);
    record(x_, std::clamp(raw, -1.0, 1.0), s0.rho, T_cur_, true);
  } else {
    record(x_, -amplitude() * regularized_sign(s0.sigma, sc_.eps_sign), s0.rho, std::nullopt, true);
  }

  while (true) {
    if (traj_.steps >= sc_.max_steps) throw NumericalBlowup("step budget exhausted");
    if (stage_ == Stage::Terminal) {
      if (T_cur_ <= sc_.arrival_factor * d_.plan.theta) {
        traj_.total_time = t_ + T_cur_;
        event(EventKind::Arrival, "T_frak below threshold; remainder " + std::to_string(T_cur_));
        stage_ = Stage::Arrived;
        traj_.stage_entry[3] = t_;
        if (!traj_.samples.empty() && traj_.samples.back().t == t_) {
          traj_.samples.back().stage = Stage::Arrived;
        } else {
          traj_.samples.push_back(Sample{t_, x_, 0.0, stage_, dual_.evaluate(x_).rho, T_cur_});
        }
        traj_.outcome = Outcome::Arrived;
        break;
      }
    }
    if (t_ >= sc_.t_max * (1.0 - 1e-15)) {
      if (sc_.on_horizon == HorizonPolicy::Throw)
        throw HorizonExceeded("horizon t_max = " + std::to_string(sc_.t_max) + " reached in stage " +
                              to_string(stage_));
      traj_.outcome = Outcome::HorizonReached;
      traj_.total_time = t_;
      break;
    }
    const bool done = stage_ == Stage::Terminal ? terminal_step() : switching_step();
    ++traj_.steps;
    if (!x_.allFinite()) throw NumericalBlowup("state became non-finite at t = " + std::to_string(t_));
    take_probe(x_);
    if (done) break;
  }
  if (traj_.outcome != Outcome::Arrived) traj_.total_time = t_;
  if (!traj_.samples.empty() && traj_.samples.back().t < t_) {
    const auto s = dual_.evaluate(x_);
    traj_.samples.push_back(Sample{t_, x_, traj_.samples.back().u, stage_, s.rho, std::nullopt});
  }
  return std::move(traj_);
}

bool Runner::terminal_step() {
  const double T0 = T_cur_;
  const double h = std::min(step_limit(), sc_.terminal_step_fraction * T0);
  // The time-to-go is re-solved at every stage so RK4 sees the smooth closed loop.
  const ControlFn u = [this, T0](const PhaseState& x) {
    if (x.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    const double T = solve_time_scale(d_.terminal, d_.transform.to_canonical(x), 1e-13, T0).T_frak;
    return std::clamp(terminal_raw(x, T), -1.0, 1.0);
  };
  const PhaseState x1 = rk4(sys_, x_, h, u);
  t_ += h;
  x_ = x1;
  T_cur_ = x_.cwiseAbs().maxCoeff() == 0.0
               ? 0.0
               : solve_time_scale(d_.terminal, d_.transform.to_canonical(x_), 1e-13, T0 - h).T_frak;
  const double raw = terminal_raw(x_, T_cur_);
  if (sc_.monitors.control_bound)
    monitor(std::abs(raw) <= 1.0 + 1e-9, true, bad_u_, "terminal control exceeds 1; saturated");
  if (sc_.monitors.strip)
    monitor(std::abs(d_.transform.C.dot(x_)) <= 0.5 + 1e-9, false, bad_strip_,
            "|Cx| exceeds 1/2 in the terminal stage");
  if (sc_.monitors.time_to_go && T_cur_ > 0.0)
    monitor(std::abs((T0 - T_cur_) / h - 1.0) <= 1e-3, false, bad_slope_,
            "time-to-go slope deviates from -1");
  const double rho = dual_.evaluate(x_).rho;
  record(x_, std::clamp(raw, -1.0, 1.0), rho, T_cur_, false);
  return false;
}

bool Runner::switching_step() {
  const double eps = sc_.eps_sign;
  const auto s0 = dual_.evaluate(x_);
  // A forced regime is only trusted while sigma still sits on the edge that was crossed.
  Regime regime = regime_of(s0.sigma, eps);
  if (forced_ && std::abs(std::abs(s0.sigma) - eps) <= 1e-6 * eps) regime = *forced_;
  forced_.reset();
  double h = step_limit();
  if (regime == Regime::Band) h = std::min(h, band_step(x_));
  const ControlFn u = regime_control(regime);

  // Event functions: positive while nothing has happened.
  struct Check {
    int id;
    std::function<double(const PhaseState&)> g;
  };
  std::vector<Check> checks;
  auto sigma_of = [this](const PhaseState& x) { return dual_.evaluate(x).sigma; };
  switch (regime) {
    case Regime::Minus:
      checks.push_back({0, [=](const PhaseState& x) { return sigma_of(x) - eps; }});
      break;
    case Regime::Plus:
      checks.push_back({0, [=](const PhaseState& x) { return -sigma_of(x) - eps; }});
      break;
    case Regime::Band:
      // One check per edge: the entry edge starts at zero, the far edge must still be tracked.
      checks.push_back({0, [=](const PhaseState& x) { return eps - sigma_of(x); }});
      checks.push_back({0, [=](const PhaseState& x) { return eps + sigma_of(x); }});
      break;
  }
  if (!sc_.freeze_stage) {
    if (stage_ == Stage::High)
      checks.push_back({1, [this](const PhaseState& x) {
                          return radius(x, dual_.evaluate(x).rho) - d_.plan.r_switch;
                        }});
    // Closed-set convention: m = 1 already counts as inside.
    checks.push_back({2, [this](const PhaseState& x) {
                        const double m = zone_level(d_, x) - 1.0;
                        return m == 0.0 ? -0.0 : m;
                      }});
  }
  if (sc_.stop_rho)
    checks.push_back({3, [this](const PhaseState& x) { return dual_.evaluate(x).rho - *sc_.stop_rho; }});

  std::vector<double> g0(checks.size());
  for (std::size_t i = 0; i < checks.size(); ++i) g0[i] = checks[i].g(x_);

  const double h_min = 1e-9 * sc_.dt;
  PhaseState x1 = rk4(sys_, x_, h, u);
  int fired = -1;
  double best = h;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (!(g0[i] > 0.0)) continue;
    const double g1 = checks[i].g(x1);
    if (g1 > 0.0) continue;
    auto f = [&](double tau) {
      return tau <= 0.0 ? g0[i] : (tau >= h ? g1 : checks[i].g(rk4(sys_, x_, tau, u)));
    };
    std::uintmax_t iters = 60;
    auto stop = [h_min](double a, double b) {
      return std::abs(b - a) <= std::max(h_min, 1e-13 * std::abs(b));
    };
    const auto br = boost::math::tools::toms748_solve(f, 0.0, h, g0[i], g1, stop, iters);
    // toms748 may return an exact root (c, c) whose re-evaluation lands a rounding error above zero.
    const double tau = br.second;
    if (tau < best || (tau == best && fired < 0)) {
      best = tau;
      fired = checks[i].id;
    }
  }
  // A tangency at a band edge can make events refire at tau ~ 0; never cut below h_min.
  if (fired >= 0 && best < h_min) best = std::min(h_min, h);
  if (fired >= 0 && best < h) {
    x1 = rk4(sys_, x_, best, u);
    h = best;
  }

  // Energy balance holds exactly for constant control: dE = u sum dx_i.
  if (sc_.monitors.energy && stage_ == Stage::High && regime != Regime::Band) {
    auto energy = [this](const PhaseState& x) {
      double e = 0.0;
      for (std::size_t i = 0; i < sys_.size(); ++i)
        e += 0.5 * (x(2 * i + 1) * x(2 * i + 1) + sys_.omega(i) * sys_.omega(i) * x(2 * i) * x(2 * i));
      return e;
    };
    double dx = 0.0;
    for (std::size_t i = 0; i < sys_.size(); ++i) dx += x1(2 * i) - x_(2 * i);
    const double uval = u(x_);
    const double e0 = energy(x_);
    monitor(std::abs(energy(x1) - e0 - uval * dx) <= 1e-8 * std::max(1.0, e0), false, bad_energy_,
            "energy balance drift");
  }

  t_ += h;
  x_ = x1;
  const auto s1 = dual_.evaluate(x_);
  if (sc_.monitors.rho)
    monitor(s1.rho <= s0.rho + 1e-6 * h, true, bad_rho_, "rho increased in stage 1-2");
  if (sc_.monitors.hamiltonian && x_.cwiseAbs().maxCoeff() > 0.0)
    monitor(std::abs(hamiltonian_residual(sys_, x_)) <= 1e-6 * x_.norm(), false, bad_ham_,
            "Hamiltonian residual above 1e-6 |x|");

  bool done = false;
  switch (fired) {
    case 0: {
      Regime next;
      if (regime == Regime::Band) next = s1.sigma > 0.0 ? Regime::Minus : Regime::Plus;
      else next = Regime::Band;
      forced_ = next;
      if (next != Regime::Band) {
        if (last_saturated_ && *last_saturated_ != next)
          event(EventKind::SignSwitch, next == Regime::Minus ? "u=-U" : "u=+U");
        last_saturated_ = next;
      }
      break;
    }
    case 1:
      enter_stage(Stage::Middle);
      check_t_ = t_;
      check_rho_ = s1.rho;
      break;
    case 2:
      enter_stage(Stage::Terminal);
      T_cur_ = solve_time_scale(d_.terminal, d_.transform.to_canonical(x_)).T_frak;
      break;
    case 3:
      event(EventKind::Stop, "rho reached " + std::to_string(*sc_.stop_rho));
      traj_.outcome = Outcome::Stopped;
      done = true;
      break;
    default:
      break;
  }
  if (regime != Regime::Band && fired != 0) last_saturated_ = regime;

  double u_sample;
  std::optional<double> T_sample;
  if (stage_ == Stage::Terminal) {
    u_sample = std::clamp(terminal_raw(x_, T_cur_), -1.0, 1.0);
    T_sample = T_cur_;
  } else {
    u_sample = -amplitude() * regularized_sign(s1.sigma, eps);
  }
  record(x_, u_sample, s1.rho, T_sample, fired >= 0 || done);

  if (!done && stage_ != Stage::Terminal && t_ - check_t_ >= window_) {
    if (check_rho_ - s1.rho < sc_.stall_tol) {
      event(EventKind::Stall, "rho changed by " + std::to_string(check_rho_ - s1.rho) + " over " +
                                  std::to_string(t_ - check_t_));
      traj_.outcome = Outcome::Stalled;
      done = true;
    }
    check_t_ = t_;
    check_rho_ = s1.rho;
  }
  return done;
}

}  // namespace

Trajectory simulate(const Scenario& scenario) {
  scenario.validate();
  Runner runner(scenario);
  return runner.run();
}

}  // namespace oscctl
