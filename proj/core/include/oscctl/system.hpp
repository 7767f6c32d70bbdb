#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace oscctl {

/// Phase coordinates interleaved as (x_1, y_1, ..., x_n, y_n).
using PhaseState = Eigen::VectorXd;
/// Dual coordinates interleaved as (xi_1, eta_1, ..., xi_n, eta_n).
using MomentumVector = Eigen::VectorXd;
/// Nonnegative dual amplitudes, one per oscillator.
using ZVector = Eigen::VectorXd;

/// n undamped oscillators x_i'' + omega_i^2 x_i = u sharing one scalar input.
class OscillatorSystem {
 public:
  /// Throws ValidationError unless every frequency is finite, positive and
  /// the set is pairwise distinct.
  explicit OscillatorSystem(std::vector<double> omega);

  std::size_t size() const { return omega_.size(); }
  std::size_t dim() const { return 2 * omega_.size(); }
  const std::vector<double>& omega() const { return omega_; }
  double omega(std::size_t i) const { return omega_[i]; }

  Eigen::MatrixXd A() const;
  Eigen::VectorXd B() const;

  /// e_i = sqrt(omega_i^2 x_i^2 + y_i^2).
  Eigen::VectorXd energy(const PhaseState& x) const;
  /// z_i = sqrt(eta_i^2 + xi_i^2 / omega_i^2).
  ZVector amplitudes(const MomentumVector& p) const;

  /// A x + B u.
  PhaseState field(const PhaseState& x, double u) const;
  /// Exact solution of x' = Ax + Bu with constant u over time t.
  PhaseState flow(const PhaseState& x, double u, double t) const;

  void check_state(const PhaseState& x) const;

 private:
  std::vector<double> omega_;
};

}  // namespace oscctl
