#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oscctl::detail {

/// One rule per thread: the integrator grows its abscissa tables lazily.
boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule();

/// Sorted, de-duplicated breakpoints clipped to [a, b], endpoints included.
std::vector<double> make_breaks(double a, double b, std::vector<double> inner);

/// Sum of tanh-sinh integrals over consecutive pieces of `breaks`.
template <class F>
double integrate_pieces(const F& f, const std::vector<double>& breaks, double tol,
                        double* error = nullptr) {
  auto& rule = tanh_sinh_rule();
  // An explicit return type keeps boost's overload resolution from instantiating f.
  auto g = [&f](double x) -> double { return f(x); };
  double total = 0.0, err_total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (!(b > a)) continue;
    double err = 0.0;
    total += rule.integrate(g, a, b, tol, &err);
    err_total += err;
  }
  if (error) *error = err_total;
  return total;
}

/// Fixed 15-point Gauss-Legendre on [a, b].
template <class F>
double gauss15(const F& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 15>::integrate(f, a, b);
}

}  // namespace oscctl::detail
