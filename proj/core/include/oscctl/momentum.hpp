#pragma once

#include <cstddef>
#include <optional>

#include "oscctl/system.hpp"

namespace oscctl {

/// Maximizer of <e, z> over the unit ball of the support function.
struct DualSolution {
  ZVector z;
  double rho = 0.0;            ///< optimal value <e, z>
  std::size_t iterations = 0;
  double residual = 0.0;       ///< |e - rho grad h(z)| / |e|
};

inline constexpr double kDualTol = 1e-12;

/// Throws ZeroEnergy when e = 0 and NoConvergence when the iteration budget runs out.
DualSolution solve_z(const OscillatorSystem& sys, const Eigen::VectorXd& e,
                     const std::optional<ZVector>& warm_start = std::nullopt,
                     double tol = kDualTol);

/// Radius function: the norm whose unit ball is the limit shape of reachable sets.
double rho_norm(const OscillatorSystem& sys, const PhaseState& x, double tol = kDualTol);

/// Outer normal p(x) = d rho / dx, blocks (z_i / e_i)(omega_i^2 x_i, y_i).
MomentumVector momentum_from_state(const OscillatorSystem& sys, const PhaseState& x,
                                   double tol = kDualTol);

/// <p(x), B> = sum z_i y_i / e_i; also the rate d rho / dt per unit control.
double switching_function(const OscillatorSystem& sys, const PhaseState& x, double tol = kDualTol);

/// Clamped linear regularization of sign with half-width eps.
inline double regularized_sign(double s, double eps) {
  const double v = s / eps;
  return v > 1.0 ? 1.0 : (v < -1.0 ? -1.0 : v);
}

/// u = -U sgn_eps(<p(x), B>).
double basic_control(const OscillatorSystem& sys, const PhaseState& x, double amplitude,
                     double deadband, double tol = kDualTol);

/// <Ax, p(x)>, identically zero for the exact momentum.
double hamiltonian_residual(const OscillatorSystem& sys, const PhaseState& x,
                            double tol = kDualTol);

/// Warm-started dual solver owned by a single trajectory.
class DualCache {
 public:
  explicit DualCache(const OscillatorSystem& sys, double tol = kDualTol) : sys_(sys), tol_(tol) {}

  const DualSolution& solve(const Eigen::VectorXd& e);
  /// rho, sigma and p for a state; e_i = 0 blocks give zero.
  struct StateDual {
    double rho = 0.0;
    double sigma = 0.0;
  };
  StateDual evaluate(const PhaseState& x);
  void reset() { last_.reset(); }

 private:
  const OscillatorSystem& sys_;
  double tol_;
  std::optional<DualSolution> last_;
};

}  // namespace oscctl
