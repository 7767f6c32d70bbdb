#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "oscctl/exact.hpp"
#include "oscctl/terminal.hpp"

namespace oscctl::testing {

/// Tensor-product midpoint rule for the torus average of |sum z_i cos phi_i|, n <= 3.
double torus_midpoint(const Eigen::VectorXd& z, std::size_t nodes);

/// Midpoint rule for int_0^T |sum eta_i cos w_i t + xi_i sin w_i t / w_i| dt.
double reachable_support_midpoint(const std::vector<double>& omega, const Eigen::VectorXd& p,
                                  double T, std::size_t nodes);

/// Closed-form flow of x'' + w^2 x = u with constant u.
Eigen::Vector2d oscillator_flow(double w, const Eigen::Vector2d& x, double u, double t);

/// c_k = (-1)^{N+1} w_k^{2N} prod_{i != k} (w_i^2 - w_k^2)^{-1} in exact arithmetic.
std::vector<Rational> feedback_oracle(const std::vector<Rational>& omega_sq);

/// Monomial coefficients of the shifted Jacobi polynomial of degree k from its
/// explicit sum, independent of the Rodrigues expansion used by the library.
std::vector<BigInt> jacobi_row_oracle(std::size_t k);

/// Canonical chain closed loop xf' = A xf + B v(xf) integrated with RK4 at
/// step fraction * T(xf), until T <= stop_fraction * T(xf0).
struct ChainRun {
  std::vector<double> t;
  std::vector<double> T;
  double max_control = 0.0;
  Eigen::VectorXd x_end;
};
ChainRun integrate_chain(const TerminalController& ctrl, const Eigen::VectorXd& xf0,
                         double step_fraction = 5e-3, double stop_fraction = 1e-2);

/// Least-squares slope and coefficient of determination.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace oscctl::testing
