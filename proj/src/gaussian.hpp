#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace noisyldpc::detail {

// E[h(X)] for X ~ N(m, var) by adaptive Gauss-Kronrod over the standard
// normal variable, split where X crosses zero.
template <class F>
double gaussian_expectation(double m, double var, F&& h) {
  if (var <= 0.0) return h(m);
  using boost::math::quadrature::gauss_kronrod;
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double s = std::sqrt(var);
  const double inv_sqrt_2pi = boost::math::constants::one_div_root_two_pi<double>();
  auto integrand = [&](double z) { return inv_sqrt_2pi * std::exp(-0.5 * z * z) * h(m + s * z); };
  const double z0 = std::clamp(-m / s, -40.0, 40.0);
  constexpr double tol = 1e-13;
  constexpr unsigned depth = 20;
  return gauss_kronrod<double, 61>::integrate(integrand, -inf, z0, depth, tol) +
         gauss_kronrod<double, 61>::integrate(integrand, z0, inf, depth, tol);
}

}  // namespace noisyldpc::detail
