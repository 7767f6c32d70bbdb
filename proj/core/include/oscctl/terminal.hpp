#pragma once

#include <cstddef>
#include <optional>

#include "oscctl/canonical.hpp"
#include "oscctl/exact.hpp"

namespace oscctl {

/// q_ij = 1 / ((i+j)(i+j-1)), 1-based.
DenseMatrix<Rational> gram_matrix(std::size_t dim);
/// Row k holds the monomial coefficients of the shifted Jacobi polynomial P_k,
/// orthogonal on [0, 1] with weight (1 - x).
DenseMatrix<BigInt> jacobi_coefficients(std::size_t dim);
/// Inverse of the Gram matrix, checked against A^T diag(2k) A. Throws InternalMismatch.
DenseMatrix<BigInt> lyapunov_matrix(std::size_t dim);

/// Time-to-go feedback for the canonical chain.
class TerminalController {
 public:
  explicit TerminalController(std::size_t dim, std::optional<double> kappa2 = std::nullopt);

  std::size_t dim() const { return dim_; }
  const DenseMatrix<Rational>& q() const { return q_; }
  const DenseMatrix<BigInt>& Q() const { return Q_; }
  const DenseMatrix<BigInt>& jacobi() const { return jacobi_; }
  /// Row -B_frak^T Q / 2.
  const DenseMatrix<Rational>& gain_exact() const { return gain_exact_; }
  const Eigen::RowVectorXd& gain() const { return gain_; }
  const Eigen::MatrixXd& Q_double() const { return Q_double_; }
  const Eigen::MatrixXd& q_double() const { return q_double_; }
  double kappa2() const { return kappa2_; }
  double kappa() const;
  /// kappa^2 = 1 / (dim (dim + 1)), for which |v| <= 1/2.
  static double default_kappa2(std::size_t dim);

  /// <Q y, y> with y_i = xf_i / s^i, evaluated as sum 2k (P y)_k^2.
  double level(const Eigen::VectorXd& xf, double s) const;
  /// Gain applied to y = delta(s) xf, evaluated from the same factorization.
  double feedback(const Eigen::VectorXd& xf, double s) const;

 private:
  std::size_t dim_;
  DenseMatrix<Rational> q_;
  DenseMatrix<BigInt> jacobi_;
  DenseMatrix<BigInt> Q_;
  DenseMatrix<Rational> gain_exact_;
  Eigen::RowVectorXd gain_;
  Eigen::MatrixXd Q_double_, q_double_, jacobi_double_;
  double kappa2_;

  friend struct TimeScaleSolver;
};

struct TimeScale {
  double T_frak = 0.0;
  std::size_t iterations = 0;
};

/// Unique T > 0 with level(xf, T) = kappa^2. Throws ZeroState for xf = 0.
TimeScale solve_time_scale(const TerminalController& ctrl, const Eigen::VectorXd& xf,
                           double tol = 1e-13, std::optional<double> guess = std::nullopt);

/// v = gain * delta(T(xf)) xf.
double terminal_control_canonical(const TerminalController& ctrl, const Eigen::VectorXd& xf,
                                  double tol = 1e-13);

/// u = C x + v(D^-1 x); zero at the origin.
double terminal_control_physical(const CanonicalTransform& transform,
                                 const TerminalController& ctrl, const PhaseState& x,
                                 double tol = 1e-13);

}  // namespace oscctl
