#pragma once

#include <optional>
#include <string>
#include <utility>

#include "oscctl/canonical.hpp"
#include "oscctl/system.hpp"
#include "oscctl/terminal.hpp"

namespace oscctl {

enum class Stage { High = 0, Middle = 1, Terminal = 2, Arrived = 3 };
const char* to_string(Stage s);

/// How the stage-one threshold is measured.
enum class RadiusKind { Rho, Euclidean };
const char* to_string(RadiusKind k);
RadiusKind radius_kind_from_string(const std::string& s);

struct ZonePlan {
  double theta = 0.0;       ///< scale of the terminal ellipsoid
  double r_switch = 0.0;    ///< high -> middle threshold
  RadiusKind r_switch_kind = RadiusKind::Euclidean;
  double U = 1.0;           ///< middle-zone amplitude
  double lambda_in = 0.0;   ///< largest Euclidean ball inside the terminal ellipsoid
  double kappa2 = 0.0;
};

/// Optional overrides for plan construction.
struct PlanOptions {
  std::optional<double> r_switch;
  RadiusKind r_switch_kind = RadiusKind::Euclidean;
  std::optional<double> theta;
  std::optional<double> U;
  std::optional<double> kappa2;
};

/// Everything needed to run the three-stage feedback for one system.
struct ControlDesign {
  OscillatorSystem sys;
  CanonicalTransform transform;
  TerminalController terminal;
  ZonePlan plan;
};

/// 4 max_i omega_i^-2 sqrt(n): outside the amplitude-one standstill segment.
double default_r_switch(const OscillatorSystem& sys);

/// sqrt(<delta(theta)^-1 q delta(theta)^-1 v, v>) with v = D^-T C^T.
double strip_constraint(const CanonicalTransform& transform, const TerminalController& ctrl,
                        double theta);
/// Largest theta with strip_constraint(theta) <= 1/2. Throws DegenerateC when C D = 0.
double theta_max(const CanonicalTransform& transform, const TerminalController& ctrl,
                 double tol = 1e-14);

/// m(x) = <Q delta(theta) D^-1 x, delta(theta) D^-1 x>.
double zone_level(const ControlDesign& design, const PhaseState& x);
struct ZoneMembership {
  bool contains = false;
  double m = 0.0;
};
ZoneMembership terminal_zone_contains(const ControlDesign& design, const PhaseState& x);

/// Positive definite matrix of m(x) in physical coordinates.
Eigen::MatrixXd zone_form(const CanonicalTransform& transform, const TerminalController& ctrl,
                          double theta);
double inscribed_ball_radius(const CanonicalTransform& transform, const TerminalController& ctrl,
                             double theta);

/// U = lambda_in / r_switch clamped to (0, 1].
double amplitude_U(double lambda_in, double r_switch);

/// Rest points A^-1 B u for u = +U and u = -U.
std::pair<PhaseState, PhaseState> standstill_interval(const OscillatorSystem& sys, double U);

ControlDesign make_design(const OscillatorSystem& sys, const PlanOptions& options = {});
/// One oscillator with omega = 1 and a Euclidean switching radius of 2.
ControlDesign toy_design();

/// Monotone stage assignment. `rho` may be supplied when already known.
Stage classify(const ControlDesign& design, const PhaseState& x, Stage previous,
               std::optional<double> rho = std::nullopt);

}  // namespace oscctl
