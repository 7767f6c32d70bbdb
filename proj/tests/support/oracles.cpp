#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "oscctl/canonical.hpp"

namespace oscctl::testing {

using std::numbers::pi;

double torus_midpoint(const Eigen::VectorXd& z, std::size_t nodes) {
  const Eigen::Index n = z.size();
  if (n < 1 || n > 3) throw std::invalid_argument("torus_midpoint: n must be 1..3");
  std::vector<double> c(nodes);
  for (std::size_t k = 0; k < nodes; ++k) c[k] = std::cos(2.0 * pi * (k + 0.5) / nodes);
  double sum = 0.0;
  if (n == 1) {
    for (double a : c) sum += std::abs(z(0) * a);
    return sum / nodes;
  }
  if (n == 2) {
    for (double a : c)
      for (double b : c) sum += std::abs(z(0) * a + z(1) * b);
    return sum / (double(nodes) * nodes);
  }
  for (double a : c)
    for (double b : c) {
      const double s = z(0) * a + z(1) * b;
      for (double d : c) sum += std::abs(s + z(2) * d);
    }
  return sum / (double(nodes) * nodes * nodes);
}

double reachable_support_midpoint(const std::vector<double>& omega, const Eigen::VectorXd& p,
                                  double T, std::size_t nodes) {
  const double h = T / nodes;
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = (k + 0.5) * h;
    double g = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i)
      g += p(2 * i + 1) * std::cos(omega[i] * t) + p(2 * i) * std::sin(omega[i] * t) / omega[i];
    sum += std::abs(g);
  }
  return sum * h;
}

Eigen::Vector2d oscillator_flow(double w, const Eigen::Vector2d& x, double u, double t) {
  const double rest = u / (w * w);
  const double a = x(0) - rest;
  const double c = std::cos(w * t), s = std::sin(w * t);
  return {rest + a * c + x(1) * s / w, -a * w * s + x(1) * c};
}

std::vector<Rational> feedback_oracle(const std::vector<Rational>& omega_sq) {
  const std::size_t N = omega_sq.size();
  std::vector<Rational> c(N);
  for (std::size_t k = 0; k < N; ++k) {
    Rational v(1);
    for (std::size_t j = 0; j < N; ++j) v *= omega_sq[k];
    for (std::size_t i = 0; i < N; ++i)
      if (i != k) v /= (omega_sq[i] - omega_sq[k]);
    c[k] = (N % 2 == 1) ? v : Rational(-v);
  }
  return c;
}

namespace {

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  BigInt r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

// P_k(x) = sum_s C(k, s) C(k+1, s) (-x)^s (1-x)^{k-s}.
std::vector<BigInt> jacobi_row_oracle(std::size_t k) {
  std::vector<BigInt> coeff(k + 1, 0);
  for (std::size_t s = 0; s <= k; ++s) {
    const BigInt w = binomial(k, s) * binomial(k + 1, s) * ((s % 2 == 0) ? 1 : -1);
    // (1-x)^{k-s} contributes x^j with C(k-s, j) (-1)^j.
    for (std::size_t j = 0; j + s <= k; ++j) {
      const BigInt term = w * binomial(k - s, j) * ((j % 2 == 0) ? 1 : -1);
      coeff[s + j] += term;
    }
  }
  return coeff;
}

ChainRun integrate_chain(const TerminalController& ctrl, const Eigen::VectorXd& xf0,
                         double step_fraction, double stop_fraction) {
  const Eigen::MatrixXd A = canonical_chain(ctrl.dim());
  auto field = [&](const Eigen::VectorXd& x, double& v) {
    v = terminal_control_canonical(ctrl, x);
    Eigen::VectorXd dx = A * x;
    dx(0) += v;
    return dx;
  };
  ChainRun run;
  Eigen::VectorXd x = xf0;
  double t = 0.0;
  const double T0 = solve_time_scale(ctrl, x).T_frak;
  double T = T0;
  while (T > stop_fraction * T0) {
    run.t.push_back(t);
    run.T.push_back(T);
    const double h = step_fraction * T;
    double v1, v2, v3, v4;
    const Eigen::VectorXd k1 = field(x, v1);
    const Eigen::VectorXd k2 = field(x + 0.5 * h * k1, v2);
    const Eigen::VectorXd k3 = field(x + 0.5 * h * k2, v3);
    const Eigen::VectorXd k4 = field(x + h * k3, v4);
    run.max_control = std::max({run.max_control, std::abs(v1), std::abs(v2), std::abs(v3), std::abs(v4)});
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
    T = solve_time_scale(ctrl, x).T_frak;
  }
  run.t.push_back(t);
  run.T.push_back(T);
  run.x_end = x;
  return run;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  LineFit f;
  const double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
  f.slope = cxy / vx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r2 = vy > 0 ? cxy * cxy / (vx * vy) : 1.0;
  return f;
}

}  // namespace oscctl::testing
