#pragma once

#include <cmath>

namespace alphamod {

/// Radial profile of the smooth cut-off: 1 for r <= 1, 0 for r >= 2,
/// psi(r - 1) in between with psi(t) = g(1-t) / (g(1-t) + g(t)) and
/// g(t) = exp(-1/t) for t > 0.
inline double bump_radial(double r) {
  const double t = r - 1.0;
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

}  // namespace alphamod
