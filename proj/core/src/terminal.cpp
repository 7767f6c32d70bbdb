#include "oscctl/terminal.hpp"

#include <cmath>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "oscctl/errors.hpp"

namespace oscctl {

namespace {

using Poly = std::vector<BigInt>;  // ascending powers

Poly multiply(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, BigInt(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

Poly derivative(const Poly& a) {
  if (a.size() <= 1) return Poly{BigInt(0)};
  Poly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<long long>(i);
  return r;
}

// Exact division by (1 - x); throws if the remainder is nonzero.
Poly divide_one_minus_x(const Poly& a) {
  // a(x) = (1 - x) b(x)  =>  b_0 = a_0, b_i = a_i + b_{i-1}
  Poly b(a.size() - 1);
  BigInt carry = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    carry += a[i];
    b[i] = carry;
  }
  if (carry + a.back() != 0) throw InternalMismatch("Rodrigues quotient is not a polynomial");
  return b;
}

void check_dim(std::size_t dim) {
  if (dim == 0) throw ValidationError("dimension must be at least 1");
}

}  // namespace

DenseMatrix<Rational> gram_matrix(std::size_t dim) {
  check_dim(dim);
  DenseMatrix<Rational> q(dim, dim);
  for (std::size_t i = 1; i <= dim; ++i)
    for (std::size_t j = 1; j <= dim; ++j)
      q(i - 1, j - 1) = Rational(1, static_cast<long long>((i + j) * (i + j - 1)));
  return q;
}

DenseMatrix<BigInt> jacobi_coefficients(std::size_t dim) {
  check_dim(dim);
  DenseMatrix<BigInt> out(dim, dim);
  const Poly one_minus_x{1, -1}, x_minus_x2{0, 1, -1};
  for (std::size_t k = 0; k < dim; ++k) {
    Poly p = one_minus_x;
    for (std::size_t i = 0; i < k; ++i) p = multiply(p, x_minus_x2);
    for (std::size_t i = 0; i < k; ++i) p = derivative(p);
    BigInt fact = 1;
    for (std::size_t i = 2; i <= k; ++i) fact *= static_cast<long long>(i);
    for (auto& c : p) {
      if (c % fact != 0) throw InternalMismatch("Rodrigues coefficients not divisible by k!");
      c /= fact;
    }
    p = divide_one_minus_x(p);
    for (std::size_t j = 0; j < p.size() && j < dim; ++j) out(k, j) = p[j];
  }
  return out;
}

DenseMatrix<BigInt> lyapunov_matrix(std::size_t dim) {
  const auto inv = gram_matrix(dim).inverse();
  const auto A = jacobi_coefficients(dim);
  DenseMatrix<BigInt> via_jacobi(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      BigInt s = 0;
      for (std::size_t k = 0; k < dim; ++k) s += A(k, i) * A(k, j) * static_cast<long long>(2 * (k + 1));
      via_jacobi(i, j) = s;
    }
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      if (denominator(inv(i, j)) != 1 || numerator(inv(i, j)) != via_jacobi(i, j))
        throw InternalMismatch("inverse Gram matrix differs from the Jacobi factorization at (" +
                               std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
  return via_jacobi;
}

double TerminalController::default_kappa2(std::size_t dim) {
  return 1.0 / (static_cast<double>(dim) * static_cast<double>(dim + 1));
}

TerminalController::TerminalController(std::size_t dim, std::optional<double> kappa2)
    : dim_(dim),
      q_(gram_matrix(dim)),
      jacobi_(jacobi_coefficients(dim)),
      Q_(lyapunov_matrix(dim)),
      gain_exact_(1, dim),
      kappa2_(kappa2.value_or(default_kappa2(dim))) {
  if (!(kappa2_ > 0.0) || !std::isfinite(kappa2_)) throw ValidationError("kappa^2 must be positive");
  for (std::size_t j = 0; j < dim; ++j) gain_exact_(0, j) = Rational(-Q_(0, j), 2);
  gain_ = to_eigen(gain_exact_).row(0);
  Q_double_ = to_eigen(Q_);
  q_double_ = to_eigen(q_);
  jacobi_double_ = to_eigen(jacobi_);
}

double TerminalController::kappa() const { return std::sqrt(kappa2_); }

double TerminalController::level(const Eigen::VectorXd& xf, double s) const {
  double scale = 1.0, total = 0.0;
  Eigen::VectorXd y(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    scale /= s;
    y(i) = xf(i) * scale;
  }
  const Eigen::VectorXd w = jacobi_double_ * y;
  for (std::size_t k = 0; k < dim_; ++k) total += 2.0 * (k + 1) * w(k) * w(k);
  return total;
}

double TerminalController::feedback(const Eigen::VectorXd& xf, double s) const {
  double scale = 1.0, total = 0.0;
  Eigen::VectorXd y(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    scale /= s;
    y(i) = xf(i) * scale;
  }
  // P_k(0) = 1, so the first column of Q is sum_k 2k P_k.
  const Eigen::VectorXd w = jacobi_double_ * y;
  for (std::size_t k = 0; k < dim_; ++k) total -= (k + 1) * w(k);
  return total;
}

struct TimeScaleSolver {
  // log level(e^t) - log kappa^2 and its derivative in t.
  static std::pair<double, double> eval(const TerminalController& c, const Eigen::VectorXd& xf,
                                        double t) {
    const std::size_t n = c.dim_;
    const double s = std::exp(t);
    Eigen::VectorXd y(n), iy(n);
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      scale /= s;
      y(i) = xf(i) * scale;
      iy(i) = (i + 1.0) * y(i);
    }
    const Eigen::VectorXd w = c.jacobi_double_ * y, v = c.jacobi_double_ * iy;
    double g = 0.0, dg = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      g += 2.0 * (k + 1) * w(k) * w(k);
      dg -= 4.0 * (k + 1) * w(k) * v(k);
    }
    return {std::log(g) - std::log(c.kappa2_), dg / g};
  }
};

TimeScale solve_time_scale(const TerminalController& ctrl, const Eigen::VectorXd& xf, double tol,
                           std::optional<double> guess) {
  if (static_cast<std::size_t>(xf.size()) != ctrl.dim())
    throw DimensionMismatch("canonical state has the wrong length");
  if (xf.cwiseAbs().maxCoeff() == 0.0) throw ZeroState("time scale undefined at the origin");
  if (!xf.allFinite()) throw ValidationError("canonical state is not finite");

  double t0;
  if (guess && *guess > 0.0 && std::isfinite(*guess)) {
    t0 = std::log(*guess);
  } else {
    double est = 0.0;
    for (Eigen::Index i = 0; i < xf.size(); ++i)
      if (xf(i) != 0.0) est = std::max(est, std::log(std::abs(xf(i))) / (i + 1.0));
    t0 = est;
  }
  auto h = [&](double t) { return TimeScaleSolver::eval(ctrl, xf, t); };
  if (!std::isfinite(h(t0).first)) throw ValidationError("time scale level is not finite");
  double lo = t0, hi = t0;
  double step = 0.5;
  int guard = 0;
  while (h(lo).first < 0.0) {
    lo -= step;
    step *= 2.0;
    if (++guard > 200) throw NoBracket("no lower bracket for the time scale");
  }
  step = 0.5;
  while (h(hi).first > 0.0) {
    hi += step;
    step *= 2.0;
    if (++guard > 400) throw NoBracket("no upper bracket for the time scale");
  }
  // The guess already solves the equation exactly.
  if (!(lo < hi)) return {std::exp(lo), 0};
  const int digits = std::clamp(static_cast<int>(-std::log2(std::max(tol, 1e-16))), 20, 52);
  std::uintmax_t iters = 100;
  const double start = std::clamp(t0, lo, hi);
  const double t = boost::math::tools::newton_raphson_iterate(h, start, lo, hi, digits, iters);
  return {std::exp(t), static_cast<std::size_t>(iters)};
}

double terminal_control_canonical(const TerminalController& ctrl, const Eigen::VectorXd& xf,
                                  double tol) {
  const TimeScale ts = solve_time_scale(ctrl, xf, tol);
  return ctrl.feedback(xf, ts.T_frak);
}

double terminal_control_physical(const CanonicalTransform& transform,
                                 const TerminalController& ctrl, const PhaseState& x,
                                 double tol) {
  if (x.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const Eigen::VectorXd xf = transform.to_canonical(x);
  return transform.C.dot(x) + terminal_control_canonical(ctrl, xf, tol);
}

}  // namespace oscctl
