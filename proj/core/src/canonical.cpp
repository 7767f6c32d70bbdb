#include "oscctl/canonical.hpp"

#include <cmath>
#include <string>

#include "oscctl/errors.hpp"

namespace oscctl {

Rational exact_rational(double v) {
  if (!std::isfinite(v)) throw ValidationError("cannot convert a non-finite value to a rational");
  if (v == 0.0) return Rational(0);
  int exp = 0;
  const double mant = std::frexp(v, &exp);
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational r(scaled);
  exp -= 53;
  if (exp > 0) r *= Rational(BigInt(1) << exp);
  else if (exp < 0) r /= Rational(BigInt(1) << -exp);
  return r;
}

namespace {

template <class T>
T factorial(std::size_t k) {
  T f(1);
  for (std::size_t i = 2; i <= k; ++i) f *= T(static_cast<long long>(i));
  return f;
}

template <class T>
T power(const T& base, std::size_t e) {
  T r(1);
  for (std::size_t i = 0; i < e; ++i) r *= base;
  return r;
}

void check_size(std::size_t n) {
  if (n == 0) throw ValidationError("at least one oscillator is required");
  if (n > kMaxCanonicalOscillators)
    throw ValidationError("canonical reduction supports at most " +
                          std::to_string(kMaxCanonicalOscillators) + " oscillators");
}

template <class T>
std::vector<T> feedback_coefficients(const std::vector<T>& w2) {
  const std::size_t n = w2.size();
  check_size(n);
  std::vector<T> c(n);
  const T sign = (n % 2 == 1) ? T(1) : T(-1);  // (-1)^{n+1}
  for (std::size_t k = 0; k < n; ++k) {
    T den(1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const T d = w2[i] - w2[k];
      if (d == T(0)) throw DuplicateFrequency("omega_" + std::to_string(i + 1) + " equals omega_" +
                                              std::to_string(k + 1));
      den *= d;
    }
    c[k] = sign * power(w2[k], n) / den;
  }
  return c;
}

// Columns e_1 = B, e_{i+1} = -(A + BC) e_i / i.
template <class T>
DenseMatrix<T> gauge(const std::vector<T>& w2) {
  const std::size_t n = w2.size();
  const std::vector<T> c = feedback_coefficients(w2);
  DenseMatrix<T> closed(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    closed(2 * i, 2 * i + 1) = T(1);
    closed(2 * i + 1, 2 * i) = -w2[i];
    for (std::size_t k = 0; k < n; ++k) closed(2 * i + 1, 2 * k) += c[k];
  }
  DenseMatrix<T> D(2 * n, 2 * n);
  std::vector<T> v(2 * n, T(0));
  for (std::size_t i = 0; i < n; ++i) v[2 * i + 1] = T(1);
  for (std::size_t col = 0; col < 2 * n; ++col) {
    for (std::size_t r = 0; r < 2 * n; ++r) D(r, col) = v[r];
    std::vector<T> next(2 * n, T(0));
    for (std::size_t r = 0; r < 2 * n; ++r)
      for (std::size_t k = 0; k < 2 * n; ++k)
        if (closed(r, k) != T(0)) next[r] -= closed(r, k) * v[k];
    const T div(static_cast<long long>(col + 1));
    for (auto& x : next) x /= div;
    v = std::move(next);
  }
  return D;
}

// Block formula with d_ij = (-1)^{j-1} lambda_i^{j-1} [[0, -1/(2j-1)!], [1/(2j-2)!, 0]].
template <class T>
DenseMatrix<T> gauge_blocks(const std::vector<T>& w2) {
  const std::size_t n = w2.size();
  check_size(n);
  T total(0);
  for (const T& v : w2) total += v;
  DenseMatrix<T> D(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const T lam = total - w2[i];
    T lam_pow(1);
    for (std::size_t j = 0; j < n; ++j) {
      const T s = (j % 2 == 0) ? lam_pow : T(-lam_pow);
      D(2 * i, 2 * j + 1) = -s / factorial<T>(2 * j + 1);
      D(2 * i + 1, 2 * j) = s / factorial<T>(2 * j);
      lam_pow *= lam;
    }
  }
  return D;
}

template <class T>
DenseMatrix<T> chain(std::size_t dim) {
  DenseMatrix<T> a(dim, dim);
  for (std::size_t i = 0; i + 1 < dim; ++i) a(i + 1, i) = T(-static_cast<long long>(i + 1));
  return a;
}

std::vector<double> squares(const std::vector<double>& omega) {
  std::vector<double> w2;
  for (double w : omega) w2.push_back(w * w);
  return w2;
}

}  // namespace

Eigen::RowVectorXd feedback_row(const std::vector<double>& omega) {
  const auto c = feedback_coefficients(squares(omega));
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(2 * omega.size());
  for (std::size_t k = 0; k < c.size(); ++k) row(2 * k) = c[k];
  return row;
}

Eigen::MatrixXd gauge_matrix(const std::vector<double>& omega) {
  feedback_coefficients(squares(omega));  // validates distinctness
  return to_eigen(gauge(squares(omega)));
}

Eigen::MatrixXd canonical_chain(std::size_t dim) { return to_eigen(chain<double>(dim)); }

CanonicalTransform make_canonical(const OscillatorSystem& sys) {
  CanonicalTransform t;
  t.C = feedback_row(sys.omega());
  t.D = gauge_matrix(sys.omega());
  t.D_inv = t.D.partialPivLu().inverse();
  t.A_frak = canonical_chain(sys.dim());
  t.B_frak = Eigen::VectorXd::Unit(sys.dim(), 0);
  t.lambda.resize(sys.size());
  double total = 0.0;
  for (double w : sys.omega()) total += w * w;
  for (std::size_t k = 0; k < sys.size(); ++k) t.lambda(k) = total - sys.omega(k) * sys.omega(k);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(t.D);
  const auto& s = svd.singularValues();
  t.condition_number = s(0) / s(s.size() - 1);
  return t;
}

DenseMatrix<Rational> feedback_row_exact(const std::vector<Rational>& omega_sq) {
  const auto c = feedback_coefficients(omega_sq);
  DenseMatrix<Rational> row(1, 2 * c.size());
  for (std::size_t k = 0; k < c.size(); ++k) row(0, 2 * k) = c[k];
  return row;
}

Eigen::MatrixXd gauge_matrix_blocks(const std::vector<double>& omega) {
  feedback_coefficients(squares(omega));
  return to_eigen(gauge_blocks(squares(omega)));
}

DenseMatrix<Rational> gauge_matrix_exact(const std::vector<Rational>& omega_sq) {
  feedback_coefficients(omega_sq);
  return gauge(omega_sq);
}

DenseMatrix<Rational> system_matrix_exact(const std::vector<Rational>& omega_sq) {
  const std::size_t n = omega_sq.size();
  DenseMatrix<Rational> A(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    A(2 * i, 2 * i + 1) = 1;
    A(2 * i + 1, 2 * i) = -omega_sq[i];
  }
  return A;
}

DenseMatrix<Rational> canonical_chain_exact(std::size_t dim) { return chain<Rational>(dim); }

ReductionReport verify_reduction(const std::vector<double>& omega, double tol) {
  OscillatorSystem sys(omega);
  const std::size_t n = sys.size(), dim = sys.dim();
  const CanonicalTransform t = make_canonical(sys);
  ReductionReport rep;
  rep.condition_number = t.condition_number;

  const Eigen::MatrixXd M = sys.A() + sys.B() * t.C;
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) P = P * M;
  const double mnorm = M.cwiseAbs().rowwise().sum().maxCoeff();
  rep.nilpotency_raw = P.cwiseAbs().maxCoeff();
  rep.nilpotency = P.cwiseAbs().rowwise().sum().maxCoeff() / std::pow(mnorm, double(dim));

  const auto lu = t.D.partialPivLu();
  rep.conjugation = (lu.solve(M * t.D) - t.A_frak).cwiseAbs().maxCoeff();
  rep.input = (lu.solve(sys.B()) - t.B_frak).cwiseAbs().maxCoeff();

  // prod(s^2 + w_i^2) = s^{2n} + sum_k c_k prod_{i != k}(s^2 + w_i^2)
  double worst = 0.0;
  for (int j = 0; j <= 400; ++j) {
    const double s = -2.0 + 4.0 * j / 400.0, s2 = s * s;
    double full = 1.0;
    for (double w : omega) full *= s2 + w * w;
    double rhs = std::pow(s2, double(n)), scale = std::abs(rhs) + std::abs(full);
    for (std::size_t k = 0; k < n; ++k) {
      double part = t.C(2 * k);
      for (std::size_t i = 0; i < n; ++i)
        if (i != k) part *= s2 + omega[i] * omega[i];
      rhs += part;
      scale += std::abs(part);
    }
    worst = std::max(worst, std::abs(full - rhs) / scale);
  }
  rep.interpolation = worst;
  double sum_c = 0.0, sum_w2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum_c += t.C(2 * k);
    sum_w2 += omega[k] * omega[k];
  }
  rep.feedback_trace = std::abs(sum_c - sum_w2) / sum_w2;

  // Same identities in exact arithmetic on the rational values of the inputs.
  std::vector<Rational> w2;
  for (double w : omega) {
    const Rational r = exact_rational(w);
    w2.push_back(r * r);
  }
  const auto Cx = feedback_row_exact(w2);
  const auto Dx = gauge_matrix_exact(w2);
  DenseMatrix<Rational> Bx(dim, 1);
  for (std::size_t i = 0; i < n; ++i) Bx(2 * i + 1, 0) = 1;
  const auto Mx = system_matrix_exact(w2) + Bx * Cx;
  DenseMatrix<Rational> Px = DenseMatrix<Rational>::identity(dim);
  for (std::size_t k = 0; k + 1 < dim; ++k) Px = Px * Mx;
  rep.nilpotency_index_exact = !Px.is_zero() && (Px * Mx).is_zero();
  const auto Dinv = Dx.inverse();
  DenseMatrix<Rational> e1(dim, 1);
  e1(0, 0) = 1;
  rep.exact_identities = rep.nilpotency_index_exact &&
                         (Dinv * Mx * Dx == canonical_chain_exact(dim)) && (Dinv * Bx == e1);

  rep.passed = rep.nilpotency <= tol && rep.conjugation <= tol && rep.input <= tol &&
               rep.interpolation <= tol && rep.feedback_trace <= tol;
  return rep;
}

}  // namespace oscctl
