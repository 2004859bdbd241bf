#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrising/model/two_point.hpp"
#include "lrising/numerics/fit.hpp"

namespace lrising::model {

// chi_k = sum of G over Lambda_k.
double susceptibility_partial(const TwoPointModel& model, int k);

struct SusceptibilityLimit {
  double chi = 0.0;
  double tail_bound = 0.0;
  std::int64_t radius = 0;
};

// chi_k with k the smallest radius whose rigorous tail bound is below tol.
// Throws CapacityError if that radius exceeds max_radius.
SusceptibilityLimit susceptibility_limit(const TwoPointModel& model, double tol, std::int64_t max_radius = 100000);

struct ExactValue {
  double value = 0.0;
  double error = 0.0;
};

// sum over z of G(z) |z|^q (q even, q >= 0; the origin counts only for q = 0).
// Synthetic models use Epstein zeta values for the pure power terms plus an explicit
// correction inside the clamp region; zero-tail tables are summed directly.
ExactValue radial_moment_exact(const TwoPointModel& model, int q);
ExactValue susceptibility_exact(const TwoPointModel& model);

// Rigorous upper bound on sum over |z|_inf > k of G(z) |z|^q for synthetic models.
double synthetic_tail_bound(const TwoPointModel& model, int q, std::int64_t k);

// Sigma_L = sum over x, y in Lambda_L of G(x - y), via overlap counts in O(L^d).
double sigma_L(const TwoPointModel& model, int L);
// The O(L^{2d}) double sum, compensated.
double sigma_L_direct(const TwoPointModel& model, int L);

struct SigmaRatioRow {
  int L = 0;
  double sigma = 0.0;
  double ratio = 0.0;    // Sigma_L / (chi |Lambda_L|)
  double deficit = 0.0;  // 1 - ratio
};

struct SigmaRatioScan {
  std::vector<SigmaRatioRow> rows;
  double chi = 0.0;
  double chi_error = 0.0;
  bool fitted = false;
  int fit_min_L = 0;
  numerics::LinearFit fit;  // log(deficit) against log L
  double rate_exponent = 0.0;  // -fit.slope
};

// fit_min_L = 0 selects the largest decade of L (L >= max L / 10, at least three points).
SigmaRatioScan sigma_ratio_scan(const TwoPointModel& model, std::span<const int> Ls, int fit_min_L = 0);

// Indices of the rows used by the "largest decade" fit window rule.
int default_fit_min(std::span<const int> Ls);

}  // namespace lrising::model
