#include "lrising/numerics/epstein.hpp"

#include <cmath>
#include <vector>

#include "lrising/errors.hpp"
#include "lrising/numerics/special.hpp"
#include "lrising/numerics/summation.hpp"

namespace lrising::numerics {

namespace {

// Calls fn(r2, multiplicity) for every z != 0 with 0 <= z_i <= k, weighting each
// representative by the number of sign patterns it stands for.
template <class Fn>
void for_each_orthant_point(int d, std::int64_t k, Fn&& fn) {
  std::vector<std::int64_t> z(static_cast<std::size_t>(d), 0);
  while (true) {
    std::int64_t r2 = 0;
    int nonzero = 0;
    for (auto v : z) {
      r2 += v * v;
      nonzero += v != 0;
    }
    if (r2 > 0) fn(r2, std::ldexp(1.0, nonzero));
    int i = 0;
    while (i < d && z[static_cast<std::size_t>(i)] == k) z[static_cast<std::size_t>(i++)] = 0;
    if (i == d) break;
    ++z[static_cast<std::size_t>(i)];
  }
}

double ewald_term(double a, double x) { return incomplete_gamma_upper(a, x) * std::pow(x, -a); }

}  // namespace

double epstein_zeta(int d, double s) {
  if (d < 1) throw DomainError("epstein_zeta: dimension must be >= 1");
  if (std::abs(s - d) < 1e-14 || std::abs(s) < 1e-14) throw PoleError("epstein_zeta: pole at s = d or s = 0");
  // Terms decay like exp(-pi r^2); |z|_inf <= 6 leaves < exp(-113).
  const std::int64_t k = 6;
  CompensatedSum acc;
  for_each_orthant_point(d, k, [&](std::int64_t r2, double mult) {
    const double x = kPi * static_cast<double>(r2);
    acc.add(mult * (ewald_term(0.5 * s, x) + ewald_term(0.5 * (d - s), x)));
  });
  acc.add(2.0 / (s - d));
  acc.add(-2.0 / s);
  return std::pow(kPi, 0.5 * s) / std::tgamma(0.5 * s) * acc.value();
}

double box_power_sum(int d, double s, std::int64_t k) {
  if (k <= 0) return 0.0;
  CompensatedSum acc;
  for_each_orthant_point(d, k, [&](std::int64_t r2, double mult) {
    acc.add(mult * std::pow(static_cast<double>(r2), -0.5 * s));
  });
  return acc.value();
}

double power_tail_bound(int d, double p, std::int64_t k) {
  if (p <= d) throw DivergenceError("power_tail_bound: exponent must exceed the dimension");
  const double h = 0.5 * std::sqrt(static_cast<double>(d));
  const double t0 = static_cast<double>(k) + 1.0 - 2.0 * h;
  if (t0 <= 0.0) {
    // Fall back to k' = smallest radius where the bound applies plus the explicit shell between.
    const std::int64_t k1 = static_cast<std::int64_t>(std::ceil(2.0 * h));
    double shell = box_power_sum(d, p, k1) - box_power_sum(d, p, k);
    return shell + power_tail_bound(d, p, k1);
  }
  return sphere_area(d) * std::pow(1.0 + h / t0, d - 1) * std::pow(t0, d - p) / (p - d);
}

}  // namespace lrising::numerics
