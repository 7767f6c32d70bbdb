#include "oscctl/momentum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "oscctl/errors.hpp"
#include "oscctl/geometry.hpp"

namespace oscctl {

using std::numbers::pi;

namespace {

// Ratio of the two gradient components of h at (k, 1), and its derivative in k.
std::pair<double, double> gradient_ratio(double k) {
  const double kc2 = (1.0 - k) * (1.0 + k);
  const auto t = detail::elliptic_triple(k, kc2);
  const double value = k * t.B / t.E;
  const double slope = (t.K * (t.E + t.B) - 2.0 * t.B * t.E) / (t.E * t.E);
  return {value, slope};
}

// Two active components: the optimality condition reduces to one equation in k = z_lo/z_hi.
ZVector solve_pair(double e_lo, double e_hi, std::optional<double> guess, std::size_t& iters) {
  const double r = e_lo / e_hi;
  double k = 1.0;
  if (r < 1.0) {
    const double k0 = guess ? std::clamp(*guess, 0.0, 1.0) : std::min(1.0, 2.0 * r);
    std::uintmax_t it = 60;
    k = boost::math::tools::newton_raphson_iterate(
        [r](double kk) {
          const auto [v, d] = gradient_ratio(kk);
          return std::make_pair(v - r, d);
        },
        std::min(k0, 1.0 - 1e-15), 0.0, 1.0 - 1e-17, 52, it);
    iters = static_cast<std::size_t>(it);
  }
  const double h = detail::h2_closed(k, 1.0);
  ZVector z(2);
  z << k / h, 1.0 / h;
  return z;
}

// Newton on f(w) = h(w)^2 / 2 - <e, w>; the minimizer is rho * z.
ZVector solve_general(const Eigen::VectorXd& e, const std::optional<ZVector>& warm, double tol,
                      std::size_t& iters) {
  const Eigen::Index m = e.size();
  const double qtol = std::max(1e-3 * tol, 1e-13);
  auto grad_h = [&](const Eigen::VectorXd& w) { return h_gradient(w, qtol); };

  Eigen::VectorXd w = warm ? Eigen::VectorXd(*warm) : Eigen::VectorXd(e / e.norm());
  w = w.cwiseMax(1e-6 * w.maxCoeff());
  {
    const Eigen::VectorXd g = grad_h(w);
    const double h = g.dot(w);
    w *= e.dot(w) / (h * h);
  }
  for (iters = 0; iters < 100; ++iters) {
    const Eigen::VectorXd g = grad_h(w);
    const double h = g.dot(w);
    const Eigen::VectorXd r = h * g - e;
    if (r.norm() <= tol * e.norm()) return w / h;

    Eigen::MatrixXd H(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double step = 1e-5 * w.norm();
      Eigen::VectorXd wp = w;
      wp(j) += step;
      Eigen::VectorXd wm = w;
      wm(j) -= step;
      H.col(j) = (grad_h(wp) - grad_h(wm)) / (2.0 * step);
    }
    H = 0.5 * (H + H.transpose()).eval();
    const Eigen::MatrixXd J = g * g.transpose() + h * H;
    Eigen::VectorXd dir = J.ldlt().solve(-r);
    if (!dir.allFinite() || dir.dot(r) >= 0.0) dir = -r;

    const double f0 = 0.5 * h * h - e.dot(w);
    double step = 1.0;
    for (int ls = 0; ls < 40; ++ls) {
      const Eigen::VectorXd wn = w + step * dir;
      const Eigen::VectorXd gn = grad_h(wn);
      const double hn = gn.dot(wn);
      // Near the optimum f changes by |r|^2, below roundoff; the residual still decreases.
      const bool armijo = 0.5 * hn * hn - e.dot(wn) <= f0 + 1e-4 * step * r.dot(dir);
      const bool smaller = (hn * gn - e).norm() <= (1.0 - 1e-4 * step) * r.norm();
      if (armijo || smaller || step < 1e-8) {
        w = wn;
        break;
      }
      step *= 0.5;
    }
  }
  throw NoConvergence("dual solver did not converge within 100 iterations");
}

}  // namespace

DualSolution solve_z(const OscillatorSystem& sys, const Eigen::VectorXd& e,
                     const std::optional<ZVector>& warm_start, double tol) {
  if (static_cast<std::size_t>(e.size()) != sys.size())
    throw DimensionMismatch("energy vector length differs from the number of oscillators");
  for (Eigen::Index i = 0; i < e.size(); ++i)
    if (!(e(i) >= 0.0) || !std::isfinite(e(i)))
      throw ValidationError("energy components must be finite and nonnegative");
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < e.size(); ++i)
    if (e(i) > 0.0) active.push_back(i);
  if (active.empty()) throw ZeroEnergy("e = 0 has no dual direction");

  DualSolution sol;
  sol.z = ZVector::Zero(e.size());
  const Eigen::Index m = static_cast<Eigen::Index>(active.size());
  Eigen::VectorXd ea(m);
  for (Eigen::Index j = 0; j < m; ++j) ea(j) = e(active[j]);

  if (m == 1) {
    sol.z(active[0]) = 0.5 * pi;
  } else if (m == 2) {
    const bool first_small = ea(0) <= ea(1);
    std::optional<double> guess;
    if (warm_start && warm_start->size() == e.size()) {
      const double a = (*warm_start)(active[0]), b = (*warm_start)(active[1]);
      if (a > 0 && b > 0) guess = first_small ? a / b : b / a;
    }
    const ZVector zp = first_small ? solve_pair(ea(0), ea(1), guess, sol.iterations)
                                   : solve_pair(ea(1), ea(0), guess, sol.iterations);
    sol.z(active[0]) = first_small ? zp(0) : zp(1);
    sol.z(active[1]) = first_small ? zp(1) : zp(0);
  } else {
    std::optional<ZVector> warm;
    if (warm_start && warm_start->size() == e.size()) {
      ZVector w(m);
      for (Eigen::Index j = 0; j < m; ++j) w(j) = std::abs((*warm_start)(active[j]));
      if (w.minCoeff() > 0) warm = w;
    }
    const ZVector za = solve_general(ea, warm, tol, sol.iterations);
    for (Eigen::Index j = 0; j < m; ++j) sol.z(active[j]) = za(j);
  }

  sol.rho = e.dot(sol.z);
  Eigen::VectorXd za(m);
  for (Eigen::Index j = 0; j < m; ++j) za(j) = sol.z(active[j]);
  const Eigen::VectorXd g = h_gradient(za, 1e-12);
  sol.residual = (ea - sol.rho * g).norm() / ea.norm();
  return sol;
}

double rho_norm(const OscillatorSystem& sys, const PhaseState& x, double tol) {
  const Eigen::VectorXd e = sys.energy(x);
  if (e.maxCoeff() == 0.0) return 0.0;
  return solve_z(sys, e, std::nullopt, tol).rho;
}

namespace {

MomentumVector assemble_momentum(const OscillatorSystem& sys, const PhaseState& x,
                                 const Eigen::VectorXd& e, const ZVector& z) {
  MomentumVector p = MomentumVector::Zero(x.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (e(i) == 0.0) continue;
    const double s = z(i) / e(i);
    p(2 * i) = s * sys.omega(i) * sys.omega(i) * x(2 * i);
    p(2 * i + 1) = s * x(2 * i + 1);
  }
  return p;
}

double sigma_of(const OscillatorSystem& sys, const PhaseState& x, const Eigen::VectorXd& e,
                const ZVector& z) {
  double s = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i)
    if (e(i) > 0.0) s += z(i) * x(2 * i + 1) / e(i);
  return s;
}

}  // namespace

MomentumVector momentum_from_state(const OscillatorSystem& sys, const PhaseState& x, double tol) {
  const Eigen::VectorXd e = sys.energy(x);
  if (e.maxCoeff() == 0.0) throw ZeroState("momentum undefined at the origin");
  return assemble_momentum(sys, x, e, solve_z(sys, e, std::nullopt, tol).z);
}

double switching_function(const OscillatorSystem& sys, const PhaseState& x, double tol) {
  const Eigen::VectorXd e = sys.energy(x);
  if (e.maxCoeff() == 0.0) throw ZeroState("switching function undefined at the origin");
  return sigma_of(sys, x, e, solve_z(sys, e, std::nullopt, tol).z);
}

double basic_control(const OscillatorSystem& sys, const PhaseState& x, double amplitude,
                     double deadband, double tol) {
  if (!(amplitude > 0.0 && amplitude <= 1.0)) throw ValidationError("amplitude must lie in (0, 1]");
  if (!(deadband > 0.0)) throw ValidationError("deadband must be positive");
  return -amplitude * regularized_sign(switching_function(sys, x, tol), deadband);
}

double hamiltonian_residual(const OscillatorSystem& sys, const PhaseState& x, double tol) {
  const MomentumVector p = momentum_from_state(sys, x, tol);
  return (sys.A() * x).dot(p);
}

const DualSolution& DualCache::solve(const Eigen::VectorXd& e) {
  std::optional<ZVector> warm;
  if (last_) warm = last_->z;
  last_ = solve_z(sys_, e, warm, tol_);
  return *last_;
}

DualCache::StateDual DualCache::evaluate(const PhaseState& x) {
  const Eigen::VectorXd e = sys_.energy(x);
  if (e.maxCoeff() == 0.0) return {};
  if (sys_.size() == 1) return {0.5 * pi * e(0), 0.5 * pi * x(1) / e(0)};
  const DualSolution& s = solve(e);
  return {s.rho, sigma_of(sys_, x, e, s.z)};
}

}  // namespace oscctl
