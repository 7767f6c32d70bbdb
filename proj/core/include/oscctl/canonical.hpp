#pragma once

#include <vector>

#include "oscctl/exact.hpp"
#include "oscctl/system.hpp"

namespace oscctl {

/// Feedback u = Cx + v and basis change x = D xf taking (A, B) to the chain
/// xf' = A_frak xf + B_frak v with subdiagonal (-1, -2, ..., -(2n-1)).
struct CanonicalTransform {
  Eigen::RowVectorXd C;
  Eigen::MatrixXd D;
  Eigen::MatrixXd D_inv;
  Eigen::MatrixXd A_frak;
  Eigen::VectorXd B_frak;
  Eigen::VectorXd lambda;        ///< lambda_k = sum_{i != k} omega_i^2
  double condition_number = 1.0; ///< 2-norm condition number of D

  Eigen::VectorXd to_canonical(const PhaseState& x) const { return D_inv * x; }
  PhaseState from_canonical(const Eigen::VectorXd& xf) const { return D * xf; }
};

/// Frequencies are capped so that factorials up to (2n-1)! stay exact in 64 bits.
inline constexpr std::size_t kMaxCanonicalOscillators = 8;

Eigen::RowVectorXd feedback_row(const std::vector<double>& omega);
/// Columns e_i = ((-1)^{i-1} / (i-1)!) (A + BC)^{i-1} B.
Eigen::MatrixXd gauge_matrix(const std::vector<double>& omega);
/// Closed block formula in powers of lambda_k. It agrees with gauge_matrix only
/// for n = 1; kept to document the mismatch.
Eigen::MatrixXd gauge_matrix_blocks(const std::vector<double>& omega);
Eigen::MatrixXd canonical_chain(std::size_t dim);
CanonicalTransform make_canonical(const OscillatorSystem& sys);

/// Exact constructions from rational squared frequencies.
DenseMatrix<Rational> feedback_row_exact(const std::vector<Rational>& omega_sq);
DenseMatrix<Rational> gauge_matrix_exact(const std::vector<Rational>& omega_sq);
DenseMatrix<Rational> system_matrix_exact(const std::vector<Rational>& omega_sq);
DenseMatrix<Rational> canonical_chain_exact(std::size_t dim);

struct ReductionReport {
  double nilpotency = 0.0;     ///< |(A+BC)^{2n}|_inf / |A+BC|_inf^{2n}
  double nilpotency_raw = 0.0; ///< max |(A+BC)^{2n}| entry
  double conjugation = 0.0;    ///< max |D^-1 (A+BC) D - A_frak|
  double input = 0.0;          ///< max |D^-1 B - B_frak|
  double interpolation = 0.0;  ///< relative residual of the partial-fraction identity on [-2, 2]
  double feedback_trace = 0.0; ///< |sum c_k - sum omega_k^2| / sum omega_k^2
  double condition_number = 0.0;
  bool exact_identities = false;  ///< identities hold exactly in rational arithmetic
  bool nilpotency_index_exact = false;  ///< (A+BC)^{2n-1} != 0 exactly
  bool passed = false;
};

ReductionReport verify_reduction(const std::vector<double>& omega, double tol);

}  // namespace oscctl
