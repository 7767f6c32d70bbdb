#include "oscctl/zones.hpp"

#include <algorithm>
#include <cmath>

#include "oscctl/errors.hpp"
#include "oscctl/momentum.hpp"

namespace oscctl {

const char* to_string(Stage s) {
  switch (s) {
    case Stage::High: return "high";
    case Stage::Middle: return "middle";
    case Stage::Terminal: return "terminal";
    case Stage::Arrived: return "arrived";
  }
  return "?";
}

const char* to_string(RadiusKind k) { return k == RadiusKind::Rho ? "rho" : "euclidean"; }

RadiusKind radius_kind_from_string(const std::string& s) {
  if (s == "rho") return RadiusKind::Rho;
  if (s == "euclidean") return RadiusKind::Euclidean;
  throw ValidationError("r_switch_kind must be 'rho' or 'euclidean', got '" + s + "'");
}

double default_r_switch(const OscillatorSystem& sys) {
  double m = 0.0;
  for (double w : sys.omega()) m = std::max(m, 1.0 / (w * w));
  return 4.0 * m * std::sqrt(static_cast<double>(sys.size()));
}

// C x = <D^T C, xf> with xf = D^{-1} x, so the strip is the support of G_theta along D^T C.
static Eigen::VectorXd strip_direction(const CanonicalTransform& transform) {
  return transform.D.transpose() * transform.C.transpose();
}

double strip_constraint(const CanonicalTransform& transform, const TerminalController& ctrl,
                        double theta) {
  const Eigen::VectorXd v = strip_direction(transform);
  Eigen::VectorXd w(v.size());
  double s = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    s *= theta;
    w(i) = v(i) * s;
  }
  return std::sqrt(std::max(0.0, w.dot(ctrl.q_double() * w)));
}

double theta_max(const CanonicalTransform& transform, const TerminalController& ctrl, double tol) {
  const Eigen::VectorXd v = strip_direction(transform);
  if (v.cwiseAbs().maxCoeff() == 0.0) throw DegenerateC("C D vanishes; condition B is void");
  auto f = [&](double t) { return strip_constraint(transform, ctrl, std::exp(t)) - 0.5; };
  double lo = 0.0, hi = 0.0;
  while (f(lo) > 0.0) lo -= 1.0;
  while (f(hi) < 0.0) hi += 1.0;
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) <= 0.0 ? lo : hi) = mid;
  }
  return std::exp(lo);
}

double zone_level(const ControlDesign& design, const PhaseState& x) {
  design.sys.check_state(x);
  return design.terminal.level(design.transform.to_canonical(x), design.plan.theta);
}

ZoneMembership terminal_zone_contains(const ControlDesign& design, const PhaseState& x) {
  const double m = zone_level(design, x);
  return {m <= 1.0, m};
}

Eigen::MatrixXd zone_form(const CanonicalTransform& transform, const TerminalController& ctrl,
                          double theta) {
  const Eigen::Index d = transform.D.rows();
  Eigen::VectorXd scale(d);
  double s = 1.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    s /= theta;
    scale(i) = s;
  }
  const Eigen::MatrixXd S = scale.asDiagonal() * transform.D_inv;
  Eigen::MatrixXd M = S.transpose() * ctrl.Q_double() * S;
  return 0.5 * (M + M.transpose());
}

double inscribed_ball_radius(const CanonicalTransform& transform, const TerminalController& ctrl,
                             double theta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(zone_form(transform, ctrl, theta));
  return 1.0 / std::sqrt(eig.eigenvalues().maxCoeff());
}

double amplitude_U(double lambda_in, double r_switch) {
  if (!(lambda_in > 0.0)) throw ValidationError("inscribed radius must be positive");
  if (!(r_switch > 0.0)) throw ValidationError("r_switch must be positive");
  return std::min(1.0, lambda_in / r_switch);
}

std::pair<PhaseState, PhaseState> standstill_interval(const OscillatorSystem& sys, double U) {
  if (!(U >= 0.0 && U <= 1.0)) throw ValidationError("U must lie in [0, 1]");
  PhaseState plus = PhaseState::Zero(sys.dim()), minus = PhaseState::Zero(sys.dim());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const double w2 = sys.omega(i) * sys.omega(i);
    plus(2 * i) = -U / w2;
    minus(2 * i) = U / w2;
  }
  return {plus, minus};
}

ControlDesign make_design(const OscillatorSystem& sys, const PlanOptions& options) {
  CanonicalTransform transform = make_canonical(sys);
  TerminalController terminal(sys.dim(), options.kappa2);
  ZonePlan plan;
  plan.kappa2 = terminal.kappa2();
  plan.theta = options.theta.value_or(theta_max(transform, terminal));
  if (!(plan.theta > 0.0)) throw ValidationError("theta must be positive");
  plan.r_switch = options.r_switch.value_or(default_r_switch(sys));
  plan.r_switch_kind = options.r_switch_kind;
  plan.lambda_in = inscribed_ball_radius(transform, terminal, plan.theta);
  plan.U = options.U.value_or(amplitude_U(plan.lambda_in, plan.r_switch));
  if (!(plan.U > 0.0 && plan.U <= 1.0)) throw ValidationError("U must lie in (0, 1]");
  return ControlDesign{sys, std::move(transform), std::move(terminal), plan};
}

ControlDesign toy_design() {
  PlanOptions opt;
  opt.r_switch = 2.0;
  opt.r_switch_kind = RadiusKind::Euclidean;
  return make_design(OscillatorSystem({1.0}), opt);
}

Stage classify(const ControlDesign& design, const PhaseState& x, Stage previous,
               std::optional<double> rho) {
  if (previous >= Stage::Terminal) return previous;
  if (zone_level(design, x) <= 1.0) return Stage::Terminal;
  if (previous == Stage::Middle) return Stage::Middle;
  const double r = design.plan.r_switch_kind == RadiusKind::Euclidean
                       ? x.norm()
                       : rho.value_or(rho_norm(design.sys, x));
  return r <= design.plan.r_switch ? Stage::Middle : Stage::High;
}

}  // namespace oscctl
