#include "alphamod/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <memory>

#include "alphamod/errors.hpp"

namespace alphamod {

QuadratureRule gauss_legendre(std::size_t m, double a, double b) {
  if (m == 0) throw InvalidArgument("quadrature needs at least one node");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(m), &gsl_integration_glfixed_table_free);
  QuadratureRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    gsl_integration_glfixed_point(a, b, i, &rule.nodes[i], &rule.weights[i], table.get());
  }
  return rule;
}

std::vector<std::vector<double>> lagrange_integration_matrix(const std::vector<double>& x) {
  const std::size_t m = x.size();
  std::vector<std::vector<double>> M(m, std::vector<double>(m, 0.0));
  auto basis = [&](std::size_t j, double t) {
    double v = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (k != j) v *= (t - x[k]) / (x[j] - x[k]);
    }
    return v;
  };
  for (std::size_t i = 0; i < m; ++i) {
    // The basis has degree m - 1, so an m-point rule on [-1, x_i] is exact.
    const QuadratureRule sub = gauss_legendre(m, -1.0, x[i]);
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t q = 0; q < m; ++q) s += sub.weights[q] * basis(j, sub.nodes[q]);
      M[i][j] = s;
    }
  }
  return M;
}

QuadratureRule composite_gauss_legendre(std::size_t panels, std::size_t m, double a, double b) {
  if (panels == 0) throw InvalidArgument("composite rule needs at least one panel");
  QuadratureRule rule;
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const QuadratureRule r = gauss_legendre(m, a + h * p, a + h * (p + 1));
    rule.nodes.insert(rule.nodes.end(), r.nodes.begin(), r.nodes.end());
    rule.weights.insert(rule.weights.end(), r.weights.begin(), r.weights.end());
  }
  return rule;
}

}  // namespace alphamod
