#pragma once

#include <vector>

namespace lrising::numerics {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

Rule1D gauss_legendre(int n, double a, double b);

// n-point Gauss-Legendre on each of `panels` equal sub-intervals of [a, b].
Rule1D composite_gauss_legendre(int n, int panels, double a, double b);

// Gauss-Legendre on each interval [edges[i], edges[i+1]].
Rule1D gauss_legendre_on_edges(int n, const std::vector<double>& edges);

// Quadrature for the normalized surface measure on S^{d-1}, d in {2, 3}.
// d = 2: 2n equally spaced angles (exact for trigonometric degree < 2n).
// d = 3: n Gauss-Legendre nodes in cos(theta) times 2n equally spaced azimuths
//        (exact for spherical harmonics of degree < 2n).
struct SphereRule {
  int d = 0;
  std::vector<double> points;  // flattened, d coordinates per point
  std::vector<double> weights; // sum to 1
  std::size_t size() const { return weights.size(); }
  const double* point(std::size_t i) const { return points.data() + i * static_cast<std::size_t>(d); }
};

SphereRule sphere_rule(int d, int n);

}  // namespace lrising::numerics
