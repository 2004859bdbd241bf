#pragma once

#include <cstdint>

namespace lrising::numerics {

// Z_d(s) = sum over z in Z^d \ {0} of |z|^{-s}, analytically continued for s != d, s != 0.
// Evaluated by the Ewald/Chowla-Selberg splitting into two rapidly convergent sums of
// incomplete gamma functions; accurate to a few ulps times the number of terms.
double epstein_zeta(int d, double s);

// Sum over 0 < |z|_inf <= k of |z|^{-s}, by direct enumeration.
double box_power_sum(int d, double s, std::int64_t k);

// Upper bound for the sum over |z|_inf > k of |z|^{-p}, p > d.
// Each lattice point x is compared with the unit cube around it; with h = sqrt(d)/2 and
// t0 = k + 1 - 2h > 0 this gives Omega_d (1 + h/t0)^{d-1} t0^{d-p} / (p - d).
double power_tail_bound(int d, double p, std::int64_t k);

}  // namespace lrising::numerics
