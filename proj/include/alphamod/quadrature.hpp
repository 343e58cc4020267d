#pragma once

#include <cstddef>
#include <vector>

namespace alphamod {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// m-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(std::size_t m, double a = -1.0, double b = 1.0);

/// M[i][j] = int_{-1}^{x_i} l_j(x) dx for the Lagrange basis l_j on the nodes x.
std::vector<std::vector<double>> lagrange_integration_matrix(const std::vector<double>& nodes);

/// Composite Gauss-Legendre rule: `panels` equal panels of `m` nodes on [a, b].
QuadratureRule composite_gauss_legendre(std::size_t panels, std::size_t m, double a, double b);

}  // namespace alphamod
