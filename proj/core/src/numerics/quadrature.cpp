#include "lrising/numerics/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "lrising/errors.hpp"
#include "lrising/numerics/special.hpp"

namespace lrising::numerics {

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw DomainError("gauss_legendre: need at least one node");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<std::size_t>(n)), &gsl_integration_glfixed_table_free);
  if (!table) throw DomainError("gauss_legendre: table allocation failed");
  Rule1D rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    gsl_integration_glfixed_point(a, b, static_cast<std::size_t>(i), &rule.nodes[static_cast<std::size_t>(i)],
                                  &rule.weights[static_cast<std::size_t>(i)], table.get());
  }
  return rule;
}

Rule1D composite_gauss_legendre(int n, int panels, double a, double b) {
  std::vector<double> edges(static_cast<std::size_t>(panels) + 1);
  for (int i = 0; i <= panels; ++i) edges[static_cast<std::size_t>(i)] = a + (b - a) * i / panels;
  return gauss_legendre_on_edges(n, edges);
}

Rule1D gauss_legendre_on_edges(int n, const std::vector<double>& edges) {
  Rule1D base = gauss_legendre(n, -1.0, 1.0);
  Rule1D rule;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (std::size_t i = 0; i < base.size(); ++i) {
      rule.nodes.push_back(mid + half * base.nodes[i]);
      rule.weights.push_back(half * base.weights[i]);
    }
  }
  return rule;
}

SphereRule sphere_rule(int d, int n) {
  if (n < 1) throw DomainError("sphere_rule: order must be positive");
  SphereRule rule;
  rule.d = d;
  if (d == 2) {
    const int m = 2 * n;
    for (int k = 0; k < m; ++k) {
      // Offset by half a step so no node sits on a coordinate axis.
      const double th = 2.0 * kPi * (k + 0.5) / m;
      rule.points.push_back(std::cos(th));
      rule.points.push_back(std::sin(th));
      rule.weights.push_back(1.0 / m);
    }
  } else if (d == 3) {
    const Rule1D u = gauss_legendre(n, -1.0, 1.0);
    const int m = 2 * n;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double s = std::sqrt(std::max(0.0, 1.0 - u.nodes[i] * u.nodes[i]));
      for (int k = 0; k < m; ++k) {
        const double ph = 2.0 * kPi * (k + 0.5) / m;
        rule.points.push_back(s * std::cos(ph));
        rule.points.push_back(s * std::sin(ph));
        rule.points.push_back(u.nodes[i]);
        rule.weights.push_back(0.5 * u.weights[i] / m);
      }
    }
  } else {
    throw CapabilityError("sphere_rule: only d = 2 and d = 3 are supported");
  }
  return rule;
}

}  // namespace lrising::numerics
