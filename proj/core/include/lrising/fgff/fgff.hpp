#pragma once

#include <span>
#include <string>
#include <vector>

#include "lrising/testfn/multi_index.hpp"
#include "lrising/testfn/test_function.hpp"

namespace lrising::fgff {

using testfn::MultiIndex;
using testfn::TestFunction;

double omega(int d);
// 2^alpha pi^{-d/2} Gamma((d + alpha)/2) / Gamma(-alpha/2). PoleError for alpha in 2N+.
double constant_C(double alpha, int d);
// Omega_d / (2^j j! d (d + 2) ... (d + 2j - 2)).
double constant_H(int j, int d);

struct FgffConstants {
  int d = 2;
  double alpha = 1.0;
  double omega_d = 0.0;
  double c_alpha_d = 0.0;  // NaN when alpha is an even integer
  std::vector<double> H;   // H_0 .. H_{floor2(alpha)/2}
  double hurst = 0.0;      // -d/2 - alpha/2
};
FgffConstants constants(double alpha, int d);

// Average of z^gamma over the unit sphere under the normalized surface measure.
double spherical_moment(const MultiIndex& gamma, int d);

struct PizzettiReduction {
  double multi_index_side = 0.0;  // sum over even |gamma| = 2j of d^gamma g (gamma - 1)!! / gamma!
  double laplacian_side = 0.0;    // Delta^j g / (2^j j!)
  double difference = 0.0;
};
PizzettiReduction pizzetti_reduce(const TestFunction& g, int j, std::span<const double> x);

struct QuadratureConfig {
  int radial_nodes = 16;      // Gauss-Legendre nodes per radial shell
  int angular_order = 24;     // sphere rule order, or nodes of the 1D angular reduction
  int outer_nodes = 12;       // Gauss-Legendre nodes per outer panel
  int outer_panels = 8;       // panels per axis (or on the radius for radial pairs)
  double epsilon = 0.05;      // inner cutoff, relative to the scale of g
  int series_terms = 3;       // analytic spherical-mean terms used on [0, epsilon]
  double r_max = 0.0;         // radial cutoff when g has no finite support
  double tolerance = 1e-6;    // relative
  int max_refinements = 3;
  bool radial_reduction = true;  // allow 1D angular and outer reductions for radial f, g
};

enum class Subtraction { FullTaylor, Pizzetti };

struct KernelValue {
  double value = 0.0;
  double error = 0.0;
  double epsilon_spread = 0.0;
  double refinement_change = 0.0;
  int refinements = 0;
};

// K~(f, g) = int int f(x) |x - y|^{-d-alpha} (g(y) - Tay_{floor2(alpha)} g(y; x)) dx dy.
// FullTaylor averages the Taylor polynomial over the sphere numerically; Pizzetti uses
// sum_j (H_j / Omega_d) Delta^j g(x) r^{2j}. Throws AccuracyError when the tolerance is missed.
KernelValue k_tilde(const TestFunction& f, const TestFunction& g, double alpha, const QuadratureConfig& quad = {},
                    Subtraction sub = Subtraction::FullTaylor);

// The FGFF covariance: C(alpha, d) K~ (Pizzetti form) for alpha not even; for even alpha
// (4 pi^2)^{-alpha/2} int f (-Delta)^{alpha/2} g by tensor quadrature.
KernelValue k_fgff(const TestFunction& f, const TestFunction& g, double alpha, const QuadratureConfig& quad = {});

// int f Delta^j g by tensor quadrature.
KernelValue laplacian_pairing(const TestFunction& f, const TestFunction& g, int j, const QuadratureConfig& quad = {});

// |K~_FullTaylor - K~_Pizzetti| / max(|K~_FullTaylor|, tiny).
double kernel_equality_check(const TestFunction& f, const TestFunction& g, double alpha,
                             const QuadratureConfig& quad = {});

struct FourierCheck {
  double direct = 0.0;   // k_fgff
  double fourier = 0.0;  // int |xi|^alpha f^(xi) conj(g^(xi)) dxi
  double ratio = 0.0;    // direct / fourier
  double direct_error = 0.0;
};

// Gaussian envelopes only. Fourier convention h^(xi) = int h(x) exp(-2 pi i x.xi) dx.
double fourier_side(const TestFunction& f, const TestFunction& g, double alpha);
FourierCheck fourier_cross_check(const TestFunction& f, const TestFunction& g, double alpha,
                                 const QuadratureConfig& quad = {});

}  // namespace lrising::fgff
