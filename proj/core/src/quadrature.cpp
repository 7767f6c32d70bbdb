#include "quadrature.hpp"

namespace oscctl::detail {

boost::math::quadrature::tanh_sinh<double>& tanh_sinh_rule() {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  return rule;
}

std::vector<double> make_breaks(double a, double b, std::vector<double> inner) {
  std::vector<double> out{a, b};
  for (double t : inner)
    if (t > a && t < b) out.push_back(t);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double x, double y) { return std::abs(x - y) <= 1e-15 * (1 + std::abs(x)); }),
            out.end());
  return out;
}

}  // namespace oscctl::detail
