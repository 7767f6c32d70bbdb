#include "oscctl/system.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oscctl/errors.hpp"

namespace oscctl {

OscillatorSystem::OscillatorSystem(std::vector<double> omega)
    : omega_(std::move(omega)) {
  if (omega_.empty()) throw ValidationError("omega: at least one frequency is required");
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    if (!std::isfinite(omega_[i]) || omega_[i] <= 0.0)
      throw ValidationError("omega[" + std::to_string(i) + "] must be finite and positive");
  }
  std::vector<double> sorted = omega_;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] == sorted[i - 1])
      throw ValidationError(
          "omega: frequencies must be pairwise distinct (Kalman controllability condition)");
  }
}

Eigen::MatrixXd OscillatorSystem::A() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim(), dim());
  for (std::size_t i = 0; i < size(); ++i) {
    a(2 * i, 2 * i + 1) = 1.0;
    a(2 * i + 1, 2 * i) = -omega_[i] * omega_[i];
  }
  return a;
}

Eigen::VectorXd OscillatorSystem::B() const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim());
  for (std::size_t i = 0; i < size(); ++i) b(2 * i + 1) = 1.0;
  return b;
}

void OscillatorSystem::check_state(const PhaseState& x) const {
  if (static_cast<std::size_t>(x.size()) != dim())
    throw DimensionMismatch("state has " + std::to_string(x.size()) + " coordinates, expected " +
                            std::to_string(dim()));
}

Eigen::VectorXd OscillatorSystem::energy(const PhaseState& x) const {
  check_state(x);
  Eigen::VectorXd e(size());
  for (std::size_t i = 0; i < size(); ++i) e(i) = std::hypot(omega_[i] * x(2 * i), x(2 * i + 1));
  return e;
}

ZVector OscillatorSystem::amplitudes(const MomentumVector& p) const {
  check_state(p);
  ZVector z(size());
  for (std::size_t i = 0; i < size(); ++i) z(i) = std::hypot(p(2 * i + 1), p(2 * i) / omega_[i]);
  return z;
}

PhaseState OscillatorSystem::field(const PhaseState& x, double u) const {
  PhaseState dx(x.size());
  for (std::size_t i = 0; i < size(); ++i) {
    dx(2 * i) = x(2 * i + 1);
    dx(2 * i + 1) = -omega_[i] * omega_[i] * x(2 * i) + u;
  }
  return dx;
}

PhaseState OscillatorSystem::flow(const PhaseState& x, double u, double t) const {
  check_state(x);
  PhaseState out(x.size());
  for (std::size_t i = 0; i < size(); ++i) {
    const double w = omega_[i];
    const double c = std::cos(w * t), s = std::sin(w * t);
    const double rest = u / (w * w);
    const double dx = x(2 * i) - rest;
    out(2 * i) = rest + dx * c + x(2 * i + 1) * s / w;
    out(2 * i + 1) = -dx * w * s + x(2 * i + 1) * c;
  }
  return out;
}

}  // namespace oscctl
