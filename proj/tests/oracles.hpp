#pragma once

// Reference integrals computed with Boost's adaptive quadrature. Nothing here
// uses the library's grids, so these values check the grid code independently.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>

namespace oracle {

/// ∫_a^b f
template <class F>
double integral(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 30, 1e-14);
}

/// ∫_0^∞ f
template <class F>
double integral_half_line(F f) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 1e-15);
}

/// ∫_R (1+|x|+|y|)^{-a} dy by quadrature.
inline double majorant_by_quadrature(double x, double a) {
  const double base = 1.0 + std::abs(x);
  return 2.0 * integral_half_line([=](double y) { return std::pow(base + y, -a); });
}

/// Midpoint rule with n cells on [a, b].
template <class F>
double midpoint(F f, double a, double b, long n) {
  const double h = (b - a) / static_cast<double>(n);
  double acc = 0.0;
  for (long i = 0; i < n; ++i) acc += f(a + (static_cast<double>(i) + 0.5) * h);
  return acc * h;
}

}  // namespace oracle
