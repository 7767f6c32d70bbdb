#include <algorithm>
#include <cmath>
#include <numbers>

#include "oscctl/errors.hpp"
#include "oscctl/sim.hpp"

// Time-optimal synthesis for x'' + x = u, |u| <= 1.
// The switching curve is a chain of unit semicircles: below the axis centred
// at 1, 3, 5, ... for x > 0 and above it centred at -1, -3, ... for x < 0.
// Above the curve u = -1, below it u = +1.

namespace oscctl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_planar(const PhaseState& x) {
  if (x.size() != 2) throw DimensionMismatch("the n = 1 synthesis needs a 2-vector state");
  if (!x.allFinite()) throw ValidationError("state must be finite");
}

double curve_height(double x) {
  const double ax = std::abs(x);
  const double c = 2.0 * std::floor(ax / 2.0) + 1.0;
  const double r = std::sqrt(std::max(0.0, 1.0 - (ax - c) * (ax - c)));
  return x > 0.0 ? -r : r;
}

}  // namespace

double optimal_feedback_n1(const PhaseState& s, double tol) {
  check_planar(s);
  const double x = s(0), y = s(1);
  if (x == 0.0 && y == 0.0) return 0.0;
  if (x == 0.0) return y > 0.0 ? -1.0 : 1.0;
  const double gap = y - curve_height(x);
  if (std::abs(gap) <= tol * (1.0 + std::abs(x) + std::abs(y))) return x < 0.0 ? -1.0 : 1.0;
  return gap > 0.0 ? -1.0 : 1.0;
}

OptimalSolution optimal_control_n1(const PhaseState& s, double tol) {
  check_planar(s);
  OptimalSolution out;
  if (s(0) == 0.0 && s(1) == 0.0) return out;

  // Work in the frame where the current arc uses u = -1 (circles about (-1, 0),
  // clockwise); flipping the state maps the u = +1 dynamics onto it.
  double sgn = optimal_feedback_n1(s, tol) < 0.0 ? 1.0 : -1.0;
  double px = sgn * s(0), py = sgn * s(1);
  const double scale = 1.0 + std::hypot(px, py);

  for (int guard = 0; guard < 1000000; ++guard) {
    const double R = std::hypot(px + 1.0, py);
    if (std::abs(R - 1.0) <= tol * scale && py >= -tol * scale) {
      const double d = std::max(0.0, std::atan2(std::max(py, 0.0), px + 1.0));
      out.arcs.push_back({-sgn, d});
      out.tau += d;
      return out;
    }
    const double x0 = R - 1.0;
    const double c = 2.0 * std::max(0.0, std::floor(x0 / 2.0)) + 1.0;
    const double xs = (c - 1.0) / 2.0 + (R * R - 1.0) / (2.0 * (c + 1.0));
    const double ys = -std::sqrt(std::max(0.0, 1.0 - (xs - c) * (xs - c)));
    double d = std::fmod(std::atan2(py, px + 1.0) - std::atan2(ys, xs + 1.0), kTwoPi);
    if (d < 0.0) d += kTwoPi;
    // Bang arcs never exceed pi; a near-2pi value is a state sitting on the curve.
    if (d > 1.5 * std::numbers::pi) d = 0.0;
    out.arcs.push_back({-sgn, d});
    out.tau += d;
    px = -xs;
    py = -ys;
    sgn = -sgn;
  }
  throw NoConvergence("optimal synthesis did not terminate");
}

double optimal_time_n1(const OscillatorSystem& sys, const PhaseState& x, double tol) {
  if (sys.size() != 1 || sys.omega(0) != 1.0)
    throw NotToyCase("optimal oracle only covers one oscillator with omega = 1");
  sys.check_state(x);
  return optimal_control_n1(x, tol).tau;
}

}  // namespace oscctl
