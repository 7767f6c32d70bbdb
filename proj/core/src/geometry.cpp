#include "oscctl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/ellint_2.hpp>
#include <boost/math/tools/roots.hpp>

#include "oscctl/errors.hpp"
#include "quadrature.hpp"

namespace oscctl {

using std::numbers::pi;

namespace {

void check_finite(const ZVector& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (!std::isfinite(z(i))) throw ValidationError("z has a non-finite component");
  if (z.size() == 0) throw DimensionMismatch("z is empty");
}

void check_tol(double tol) {
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
}

// (E - k'^2 K) / k^2 for k^2 = m, as a hypergeometric series when m is small.
double elliptic_b(double k, double kc2, double E) {
  const double m = k * k;
  if (m < 0.5) {
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 200; ++n) {
      const double h = n + 0.5;
      term *= h * h / ((n + 2.0) * (n + 1.0)) * m;
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    return 0.25 * pi * sum;
  }
  if (kc2 <= 0.0) return E / m;
  const double K = boost::math::ellint_1(k);
  return (E - kc2 * K) / m;
}

// Components of |z| with the index of the largest one moved out.
struct AxisSplit {
  double a = 0.0;                  // largest |z_k|
  std::size_t k = 0;
  std::vector<double> others;      // nonzero remaining |z_j|
  std::vector<std::size_t> index;  // their positions in z
};

AxisSplit split_axis(const ZVector& z) {
  AxisSplit s;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (std::abs(z(i)) > s.a) {
      s.a = std::abs(z(i));
      s.k = static_cast<std::size_t>(i);
    }
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (static_cast<std::size_t>(i) == s.k || z(i) == 0.0) continue;
    s.others.push_back(std::abs(z(i)));
    s.index.push_back(static_cast<std::size_t>(i));
  }
  return s;
}

// Which torus average to take: the value, d/d others[j], or d/da.
struct Kernel {
  enum Kind { Value, DOther, DAxis } kind = Value;
  std::size_t j = 0;

  double operator()(double s, double a, const double* cosines) const {
    switch (kind) {
      case Value: return detail::axis_average(s, a);
      case DOther: return detail::axis_average_ds(s, a) * cosines[j];
      case DAxis: return detail::axis_average_da(s, a);
    }
    return 0.0;
  }
};

std::vector<double> kink_angles(double c, double zj, double a) {
  std::vector<double> out;
  for (double target : {a, -a}) {
    const double v = (target - c) / zj;
    if (v > -1.0 && v < 1.0) out.push_back(std::acos(v));
  }
  return out;
}

double torus_nested(const AxisSplit& s, const Kernel& kernel, double tol, double* error) {
  const auto& o = s.others;
  const double a = s.a;
  if (o.empty()) {
    const double c = 0.0;
    return kernel(0.0, a, &c);
  }
  if (o.size() == 1) {
    auto f = [&](double phi) {
      const double c = std::cos(phi);
      return kernel(o[0] * c, a, &c);
    };
    double err = 0.0;
    const double v = detail::integrate_pieces(f, {0.0, pi}, tol, &err) / pi;
    if (error) *error = err / pi;
    return v;
  }
  // Two free angles.
  double inner_err_max = 0.0;
  auto outer = [&](double phi1) {
    const double c1 = std::cos(phi1);
    const double shift = o[0] * c1;
    auto inner = [&](double phi2) {
      const double cs[2] = {c1, std::cos(phi2)};
      return kernel(shift + o[1] * cs[1], a, cs);
    };
    double err = 0.0;
    const double v = detail::integrate_pieces(
        inner, detail::make_breaks(0.0, pi, kink_angles(shift, o[1], a)), tol, &err);
    inner_err_max = std::max(inner_err_max, err);
    return v;
  };
  std::vector<double> outer_breaks;
  for (double v : {a - o[1], a + o[1], -a - o[1], -a + o[1]}) {
    const double c = v / o[0];
    if (c > -1.0 && c < 1.0) outer_breaks.push_back(std::acos(c));
  }
  double err = 0.0;
  const double v = detail::integrate_pieces(outer, detail::make_breaks(0.0, pi, outer_breaks),
                                            tol, &err);
  if (error) *error = (err + pi * inner_err_max) / (pi * pi);
  return v / (pi * pi);
}

// Monte Carlo over all free angles; returns value and gradient estimates.
struct MonteCarloResult {
  double value = 0.0, value_err = 0.0;
  Eigen::VectorXd grad;
};

MonteCarloResult torus_monte_carlo(const ZVector& z, const AxisSplit& s,
                                   const QuadratureBudget& budget) {
  const std::size_t m = s.others.size();
  std::mt19937_64 rng(budget.monte_carlo_seed);
  std::uniform_real_distribution<double> angle(0.0, pi);
  std::vector<double> cosines(m);
  Eigen::VectorXd grad_sum = Eigen::VectorXd::Zero(m + 1);
  double sum = 0.0, sum_sq = 0.0;
  const std::size_t N = std::max<std::size_t>(budget.monte_carlo_samples, 1000);
  for (std::size_t t = 0; t < N; ++t) {
    double sv = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      cosines[j] = std::cos(angle(rng));
      sv += s.others[j] * cosines[j];
    }
    const double g = detail::axis_average(sv, s.a);
    sum += g;
    sum_sq += g * g;
    const double gs = detail::axis_average_ds(sv, s.a);
    for (std::size_t j = 0; j < m; ++j) grad_sum(j) += gs * cosines[j];
    grad_sum(m) += detail::axis_average_da(sv, s.a);
  }
  MonteCarloResult r;
  const double n = static_cast<double>(N);
  r.value = sum / n;
  r.value_err = std::sqrt(std::max(0.0, sum_sq / n - r.value * r.value) / n);
  r.grad = Eigen::VectorXd::Zero(z.size());
  for (std::size_t j = 0; j < m; ++j)
    r.grad(s.index[j]) = std::copysign(grad_sum(j) / n, z(s.index[j]));
  r.grad(s.k) = std::copysign(grad_sum(m) / n, z(s.k));
  return r;
}

SupportValue torus_value(const ZVector& z, double tol, const QuadratureBudget& budget) {
  const AxisSplit s = split_axis(z);
  SupportValue out;
  out.method = SupportMethod::Torus;
  if (s.a == 0.0) return out;
  if (s.others.size() <= 2) {
    out.value = torus_nested(s, Kernel{}, tol, &out.error);
    return out;
  }
  const auto mc = torus_monte_carlo(z, s, budget);
  out.value = mc.value;
  out.error = mc.value_err;
  if (mc.value_err > tol * mc.value)
    throw QuadratureNotConverged("Monte Carlo standard error " + std::to_string(mc.value_err) +
                                 " exceeds the requested tolerance");
  return out;
}

Eigen::VectorXd torus_gradient(const ZVector& z, double tol, const QuadratureBudget& budget) {
  const AxisSplit s = split_axis(z);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
  if (s.others.size() > 2) return torus_monte_carlo(z, s, budget).grad;
  for (std::size_t j = 0; j < s.others.size(); ++j) {
    const double d = torus_nested(s, Kernel{Kernel::DOther, j}, tol, nullptr);
    g(s.index[j]) = std::copysign(d, z(s.index[j]));
  }
  g(s.k) = std::copysign(torus_nested(s, Kernel{Kernel::DAxis, 0}, tol, nullptr), z(s.k));
  return g;
}

// 1 - prod J0(r_i t), accurate for small t.
double one_minus_bessel_product(const std::vector<double>& r, double t) {
  bool small = true;
  for (double ri : r) small = small && (ri * t < 1.0);
  if (small) {
    double log_prod = 0.0;
    for (double ri : r) {
      const double x2 = 0.25 * (ri * t) * (ri * t);
      // J0 - 1 = sum_{k>=1} (-x^2/4)^k / (k!)^2
      double term = 1.0, dev = 0.0;
      for (int k = 1; k < 12; ++k) {
        term *= -x2 / (static_cast<double>(k) * k);
        dev += term;
      }
      log_prod += std::log1p(dev);
    }
    return -std::expm1(log_prod);
  }
  double prod = 1.0;
  for (double ri : r) prod *= boost::math::cyl_bessel_j(0, ri * t);
  return 1.0 - prod;
}

// Upper bound of int_L^inf prod_i min(1, sqrt(c_i / t)) t^-2 dt, c_i = 2/(pi r_i).
double bessel_tail_bound(const std::vector<double>& r, double L) {
  std::vector<double> c;
  for (double ri : r) c.push_back(2.0 / (pi * ri));
  std::sort(c.begin(), c.end());
  double total = 0.0;
  double lo = L;
  for (std::size_t idx = 0; idx <= c.size(); ++idx) {
    const double hi = idx < c.size() ? c[idx] : INFINITY;
    if (hi <= lo) continue;
    // On [lo, hi] the active factors are those with c_j <= lo.
    double coeff = 1.0;
    int active = 0;
    for (double cj : c)
      if (cj <= lo) {
        coeff *= std::sqrt(cj);
        ++active;
      }
    const double p = 0.5 * active + 2.0;  // integrand coeff * t^-p
    const double F_lo = std::pow(lo, 1.0 - p) / (p - 1.0);
    const double F_hi = std::isinf(hi) ? 0.0 : std::pow(hi, 1.0 - p) / (p - 1.0);
    total += coeff * (F_lo - F_hi);
    lo = hi;
  }
  return total;
}

}  // namespace

namespace detail {

double axis_average(double s, double a) {
  a = std::abs(a);
  if (std::abs(s) >= a) return std::abs(s);
  const double theta = std::acos(-s / a);
  return ((2.0 * theta - pi) * s + 2.0 * std::sqrt((a - s) * (a + s))) / pi;
}

double axis_average_ds(double s, double a) {
  a = std::abs(a);
  if (std::abs(s) >= a) return s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0);
  return 2.0 / pi * std::acos(-s / a) - 1.0;
}

double axis_average_da(double s, double a) {
  a = std::abs(a);
  if (std::abs(s) >= a) return 0.0;
  return 2.0 / pi * std::sqrt((a - s) * (a + s)) / a;
}

EllipticTriple elliptic_triple(double k, double kc2) {
  EllipticTriple t;
  t.E = boost::math::ellint_2(k);
  t.K = kc2 > 0.0 ? boost::math::ellint_1(k) : INFINITY;
  t.B = elliptic_b(k, kc2, t.E);
  return t;
}

double h2_closed(double z1, double z2) {
  double lo = std::abs(z1), hi = std::abs(z2);
  if (lo > hi) std::swap(lo, hi);
  if (hi == 0.0) return 0.0;
  const double k = lo / hi;
  const double kc2 = (hi - lo) * (hi + lo) / (hi * hi);
  const double E = boost::math::ellint_2(k);
  const double B = elliptic_b(k, kc2, E);
  return 4.0 * hi / (pi * pi) * (E + k * k * B);
}

Eigen::Vector2d h2_gradient(double z1, double z2) {
  const bool swapped = std::abs(z1) > std::abs(z2);
  const double lo = swapped ? std::abs(z2) : std::abs(z1);
  const double hi = swapped ? std::abs(z1) : std::abs(z2);
  if (hi == 0.0) throw ZeroVector("gradient undefined at z = 0");
  const double k = lo / hi;
  const double kc2 = (hi - lo) * (hi + lo) / (hi * hi);
  const double E = boost::math::ellint_2(k);
  const double B = elliptic_b(k, kc2, E);
  const double d_lo = 4.0 / (pi * pi) * k * B;
  const double d_hi = 4.0 / (pi * pi) * E;
  Eigen::Vector2d g = swapped ? Eigen::Vector2d(d_hi, d_lo) : Eigen::Vector2d(d_lo, d_hi);
  if (z1 < 0) g(0) = -g(0);
  if (z2 < 0) g(1) = -g(1);
  if (z1 == 0.0) g(0) = 0.0;
  if (z2 == 0.0) g(1) = 0.0;
  return g;
}

}  // namespace detail

SingularLocusFlag singular_locus(const ZVector& z, double rel_tol) {
  SingularLocusFlag flag;
  const double scale = z.cwiseAbs().maxCoeff();
  if (z.size() < 2 || scale == 0.0) return flag;
  std::vector<std::size_t> big;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (std::abs(z(i)) > rel_tol * scale) big.push_back(static_cast<std::size_t>(i));
  if (big.size() != 2) return flag;
  const double a = std::abs(z(big[0])), b = std::abs(z(big[1]));
  if (std::abs(a - b) <= rel_tol * scale) {
    flag.is_singular = true;
    flag.witness = std::make_pair(big[0], big[1]);
  }
  return flag;
}

SupportValue h_support_detailed(const ZVector& z, SupportMethod method, double tol,
                                const QuadratureBudget& budget) {
  check_finite(z);
  check_tol(tol);
  const std::size_t n = static_cast<std::size_t>(z.size());
  if (method == SupportMethod::Elliptic2 && n != 2)
    throw DimensionMismatch("elliptic method requires n = 2, got n = " + std::to_string(n));
  SupportValue out;
  if (z.cwiseAbs().maxCoeff() == 0.0) {
    out.method = method;
    return out;
  }
  switch (method) {
    case SupportMethod::Torus:
      return torus_value(z, tol, budget);
    case SupportMethod::Bessel:
      return h_bessel(z, 0.0, tol, budget);
    case SupportMethod::Elliptic2: {
      double z1 = z(0), z2 = z(1);
      if (std::abs(z1) > std::abs(z2)) std::swap(z1, z2);
      out.value = h_elliptic2(z1, z2, std::min(tol, 1e-12));
      out.error = 1e-14 * out.value;
      out.method = SupportMethod::Elliptic2;
      return out;
    }
    case SupportMethod::Auto:
      break;
  }
  if (n == 1) {
    out.value = 2.0 / pi * std::abs(z(0));
    out.error = 1e-16 * out.value;
    out.method = SupportMethod::Auto;
    return out;
  }
  if (n == 2) {
    out.value = detail::h2_closed(z(0), z(1));
    out.error = 1e-15 * out.value;
    out.method = SupportMethod::Elliptic2;
    return out;
  }
  return h_bessel(z, 0.0, tol, budget);
}

double h_support(const ZVector& z, SupportMethod method, double tol,
                 const QuadratureBudget& budget) {
  return h_support_detailed(z, method, tol, budget).value;
}

Eigen::VectorXd h_gradient(const ZVector& z, double tol, const QuadratureBudget& budget) {
  check_finite(z);
  check_tol(tol);
  if (z.cwiseAbs().maxCoeff() == 0.0) throw ZeroVector("gradient undefined at z = 0");
  if (z.size() == 1) return Eigen::VectorXd::Constant(1, z(0) > 0 ? 2.0 / pi : -2.0 / pi);
  if (z.size() == 2) return detail::h2_gradient(z(0), z(1));
  return torus_gradient(z, tol, budget);
}

HessianForm h_hessian_form(const ZVector& z, const Eigen::VectorXd& xi, double tol) {
  check_finite(z);
  if (xi.size() != z.size()) throw DimensionMismatch("xi and z differ in length");
  if (z.cwiseAbs().maxCoeff() == 0.0) throw ZeroVector("Hessian undefined at z = 0");
  if (singular_locus(z).is_singular)
    throw SingularLocus("Hessian is unbounded where z_i = +-z_j and the rest vanish");
  HessianForm out;
  const std::size_t n = static_cast<std::size_t>(z.size());
  if (n == 1) {
    out.backend = HessianBackend::ClosedForm;
    return out;
  }
  if (n == 2) {
    // Degree-one homogeneity leaves a rank-one Hessian along (z2, -z1).
    const double a = std::abs(z(0)), b = std::abs(z(1));
    const double x0 = z(0) < 0 ? -xi(0) : xi(0);
    const double x1 = z(1) < 0 ? -xi(1) : xi(1);
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double k = lo / hi;
    const double kc2 = (hi - lo) * (hi + lo) / (hi * hi);
    const double E = boost::math::ellint_2(k);
    const double K = boost::math::ellint_1(k);
    const double curvature = 4.0 / (pi * pi) * (K - elliptic_b(k, kc2, E)) / (hi * hi * hi);
    const double t = x0 * b - x1 * a;
    out.value = curvature * t * t;
    out.backend = HessianBackend::ClosedForm;
    return out;
  }
  const double h = 1e-4 * z.norm() / std::max(xi.norm(), 1e-300);
  const Eigen::VectorXd gp = h_gradient(z + h * xi, tol);
  const Eigen::VectorXd gm = h_gradient(z - h * xi, tol);
  out.value = std::max(0.0, (gp - gm).dot(xi) / (2.0 * h));
  out.backend = HessianBackend::FiniteDifference;
  return out;
}

SupportValue h_bessel(const ZVector& z, double truncation, double tol,
                      const QuadratureBudget& budget) {
  check_finite(z);
  check_tol(tol);
  SupportValue out;
  out.method = SupportMethod::Bessel;
  const double zmax = z.cwiseAbs().maxCoeff();
  if (zmax == 0.0) return out;
  std::vector<double> r;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (z(i) != 0.0) r.push_back(std::abs(z(i)) / zmax);

  // In scaled units s = zmax * lambda the result is zmax * c * I with I >= 1.
  double L = truncation > 0.0 ? truncation * zmax : 64.0;
  if (truncation <= 0.0) {
    while (bessel_tail_bound(r, L) > 0.5 * tol) {
      L *= 2.0;
      if (L > budget.bessel_max_cutoff)
        throw QuadratureNotConverged("Bessel truncation exceeds the configured cut-off");
    }
  }
  const double panel = 0.5 * pi;
  const std::size_t panels = static_cast<std::size_t>(std::ceil(L / panel));
  const double w = L / static_cast<double>(panels);
  auto f = [&](double t) {
    if (t == 0.0) {
      double s2 = 0.0;
      for (double ri : r) s2 += ri * ri;
      return 0.25 * s2;
    }
    return one_minus_bessel_product(r, t) / (t * t);
  };
  double integral = 0.0;
  for (std::size_t i = 0; i < panels; ++i)
    integral += detail::gauss15(f, i * w, (i + 1) * w);
  integral += 1.0 / L;
  out.value = kBesselCalibratedPrefactor * zmax * integral;
  out.error = kBesselCalibratedPrefactor * zmax * bessel_tail_bound(r, L);
  return out;
}

namespace {

double elliptic_quadrature(double z1, double z2, double tol, bool printed) {
  if (std::abs(z1) > std::abs(z2))
    throw ValidationError("elliptic formula requires |z1| <= |z2|");
  const double a2 = z1 * z1, b2 = z2 * z2;
  if (b2 == 0.0) return 0.0;
  if (std::abs(std::abs(z2) - std::abs(z1)) <= kSingularLocusTol * std::abs(z2))
    throw SingularLocus("|z1| = |z2|: the elliptic formula degenerates, use the torus path");
  auto f = [&](double phi) {
    const double c = std::cos(phi);
    const double num = printed ? (b2 - a2) : (b2 - a2 * std::cos(2.0 * phi));
    return num / std::sqrt(b2 - a2 * c * c);
  };
  const double quarter = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, 0.0, 0.5 * pi, 15, tol);
  return 4.0 * quarter / (pi * pi);
}

}  // namespace

double h_elliptic2(double z1, double z2, double tol) {
  check_tol(tol);
  return elliptic_quadrature(z1, z2, tol, false);
}

double h_elliptic2_printed(double z1, double z2, double tol) {
  check_tol(tol);
  return elliptic_quadrature(z1, z2, tol, true);
}

double support_reachable_finite(const OscillatorSystem& sys, const MomentumVector& p, double T,
                                double tol) {
  sys.check_state(p);
  if (!(T >= 0.0) || !std::isfinite(T)) throw ValidationError("horizon T must be finite and >= 0");
  if (T == 0.0 || p.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  const std::size_t n = sys.size();
  std::vector<double> w(n), ce(n), se(n);
  double wmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = sys.omega(i);
    ce[i] = p(2 * i + 1);
    se[i] = p(2 * i) / w[i];
    wmax = std::max(wmax, w[i]);
  }
  auto f = [&](double t) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += ce[i] * std::cos(w[i] * t) + se[i] * std::sin(w[i] * t);
    return s;
  };
  auto absf = [&](double t) { return std::abs(f(t)); };
  const int digits = std::max(20, static_cast<int>(-std::log2(std::max(tol, 1e-16))));
  boost::math::tools::eps_tolerance<double> stop(std::min(digits, 50));
  auto root = [&](double a, double b) {
    std::uintmax_t iters = 64;
    const auto br = boost::math::tools::toms748_solve(f, a, b, stop, iters);
    return 0.5 * (br.first + br.second);
  };

  const double width = 0.25 * pi / wmax;
  const std::size_t panels = static_cast<std::size_t>(std::ceil(T / width));
  const double h = T / static_cast<double>(panels);
  double total = 0.0;
  double f0 = f(0.0);
  for (std::size_t k = 0; k < panels; ++k) {
    const double a = k * h, b = (k + 1 == panels) ? T : (k + 1) * h;
    const double m = 0.5 * (a + b);
    const double fm = f(m), f1 = f(b);
    std::vector<double> cuts{a};
    if ((f0 < 0) != (fm < 0) && f0 != 0.0 && fm != 0.0) cuts.push_back(root(a, m));
    cuts.push_back(m);
    if ((fm < 0) != (f1 < 0) && fm != 0.0 && f1 != 0.0) cuts.push_back(root(m, b));
    cuts.push_back(b);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
      total += detail::gauss15(absf, cuts[c], cuts[c + 1]);
    f0 = f1;
  }
  return total;
}

ResonanceReport resonance_check(const std::vector<double>& omega, int max_coeff, double tol) {
  ResonanceReport rep;
  const std::size_t n = omega.size();
  rep.min_value = INFINITY;
  if (n < 2 || max_coeff < 1) return rep;
  const double count = std::pow(2.0 * max_coeff + 1.0, static_cast<double>(n));
  if (count > 5e7) throw ValidationError("resonance scan too large; lower max_coeff");
  std::vector<int> m(n, -max_coeff);
  int best_norm = 0;
  while (true) {
    // Keep one representative of each +-m pair: first nonzero entry positive.
    auto first = std::find_if(m.begin(), m.end(), [](int v) { return v != 0; });
    if (first != m.end() && *first > 0) {
      double s = 0.0;
      int norm = 0;
      for (std::size_t i = 0; i < n; ++i) {
        s += m[i] * omega[i];
        norm = std::max(norm, std::abs(m[i]));
      }
      ++rep.scanned;
      const double v = std::abs(s);
      if (v < rep.min_value || (v == rep.min_value && norm < best_norm)) {
        rep.min_value = v;
        rep.witness = m;
        best_norm = norm;
      }
    }
    std::size_t i = 0;
    while (i < n && m[i] == max_coeff) m[i++] = -max_coeff;
    if (i == n) break;
    ++m[i];
  }
  rep.resonant = rep.min_value <= tol;
  return rep;
}

}  // namespace oscctl
