#pragma once

#include <span>
#include <vector>

namespace lrising::numerics {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double residual_rms = 0.0;
  int n = 0;
};

// Weighted least squares y ~ intercept + slope * x. Empty weights means unit weights.
// Standard errors are scaled by the residual variance when n > 2.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w = {});

// Fit log|y| against log x. Points with y == 0 are rejected.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

struct Extrapolation {
  double limit = 0.0;
  double amplitude = 0.0;  // coefficient b of the correction term
  double exponent = 0.0;   // kappa in b * L^-kappa; 0 for the logarithmic form
  double spread = 0.0;     // change of the limit when the smallest L is dropped
};

// V(L) ~ limit + b * L^-kappa with kappa fitted by golden-section search on the
// least-squares residual over kappa in [kappa_lo, kappa_hi]. Needs >= 3 points.
Extrapolation extrapolate_power(std::span<const double> L, std::span<const double> v, double kappa_lo = 0.05,
                                double kappa_hi = 4.0);

// V(L) ~ limit + b / log L, linear least squares. Needs >= 2 points.
Extrapolation extrapolate_log(std::span<const double> L, std::span<const double> v);

}  // namespace lrising::numerics
