#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace graphon_rds {

/// Adaptive 15-point Gauss-Kronrod on [a,b]. The recursion depth is large
/// enough to localise a jump discontinuity to ~1e-13.
template <typename F>
double integrate(F&& f, double a, double b, double tolerance = 1e-10) {
  if (b <= a) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, /*max_depth=*/45, tolerance, &error);
}

}  // namespace graphon_rds
