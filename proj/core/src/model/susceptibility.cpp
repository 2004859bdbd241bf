#include "lrising/model/susceptibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lrising/errors.hpp"
#include "lrising/model/lattice.hpp"
#include "lrising/model/lattice_sums.hpp"
#include "lrising/numerics/epstein.hpp"
#include "lrising/numerics/summation.hpp"

namespace lrising::model {

double susceptibility_partial(const TwoPointModel& model, int k) {
  if (k < 0) throw DomainError("susceptibility_partial: k must be nonnegative");
  std::vector<AxisWeights> w(static_cast<std::size_t>(model.dim()), AxisWeights(static_cast<std::size_t>(2 * k + 1), 1.0));
  return weighted_lattice_sum(model, w);
}

double synthetic_tail_bound(const TwoPointModel& model, int q, std::int64_t k) {
  const auto& p = model.synthetic_params();
  const double main = p.exponent - q;
  if (main <= p.d) throw DivergenceError("tail bound: sum of G |z|^q diverges");
  double b = p.prefactor * numerics::power_tail_bound(p.d, main, k);
  if (p.correction_c > 0.0)
    b += p.prefactor * p.correction_c * numerics::power_tail_bound(p.d, main + p.correction_delta, k);
  return b;
}

SusceptibilityLimit susceptibility_limit(const TwoPointModel& model, double tol, std::int64_t max_radius) {
  if (!(tol > 0.0)) throw DomainError("susceptibility_limit: tol must be positive");
  if (!model.is_synthetic()) {
    const int r = model.support_radius();
    if (r < 0) throw DomainError("susceptibility_limit: table model with unknown tail");
    return {susceptibility_partial(model, r), 0.0, r};
  }
  const auto& p = model.synthetic_params();
  if (p.exponent <= p.d) throw DivergenceError("susceptibility_limit: exponent must exceed the dimension");
  std::int64_t lo = 1, hi = 1;
  while (synthetic_tail_bound(model, 0, hi) >= tol) {
    lo = hi;
    hi *= 2;
    if (lo > max_radius) throw CapacityError("susceptibility_limit: truncation radius exceeds budget");
  }
  while (lo < hi) {
    const std::int64_t mid = (lo + hi) / 2;
    if (synthetic_tail_bound(model, 0, mid) < tol)
      hi = mid;
    else
      lo = mid + 1;
  }
  if (hi > max_radius) throw CapacityError("susceptibility_limit: truncation radius exceeds budget");
  return {susceptibility_partial(model, static_cast<int>(hi)), synthetic_tail_bound(model, 0, hi), hi};
}

ExactValue radial_moment_exact(const TwoPointModel& model, int q) {
  if (q < 0 || q % 2 != 0) throw DomainError("radial_moment_exact: q must be even and nonnegative");
  const int d = model.dim();
  if (!model.is_synthetic()) {
    const int r = model.support_radius();
    if (r < 0) throw LookupError("radial_moment_exact: table model with unknown tail");
    std::vector<int> z(static_cast<std::size_t>(d), -r);
    numerics::CompensatedSum acc;
    while (true) {
      double r2 = 0.0;
      for (int v : z) r2 += static_cast<double>(v) * v;
      if (q == 0 || r2 > 0) acc.add(model(z) * std::pow(r2, 0.5 * q));
      int i = d - 1;
      while (i >= 0 && z[static_cast<std::size_t>(i)] == r) z[static_cast<std::size_t>(i--)] = -r;
      if (i < 0) break;
      ++z[static_cast<std::size_t>(i)];
    }
    return {acc.value(), 0.0};
  }
  const auto& p = model.synthetic_params();
  if (p.exponent - q <= d) throw DivergenceError("radial_moment_exact: sum diverges (exponent - q <= d)");
  numerics::CompensatedSum acc;
  if (q == 0) acc.add(1.0);
  const double z_main = p.prefactor * numerics::epstein_zeta(d, p.exponent - q);
  acc.add(z_main);
  double z_corr = 0.0;
  if (p.correction_c != 0.0) {
    z_corr = p.prefactor * p.correction_c * numerics::epstein_zeta(d, p.exponent + p.correction_delta - q);
    acc.add(z_corr);
  }
  // Replace the raw power law by the clamped value where they differ.
  const int R = static_cast<int>(std::ceil(model.raw_radius()));
  if (R > 0) {
    std::vector<int> z(static_cast<std::size_t>(d), -R);
    while (true) {
      double r2 = 0.0;
      for (int v : z) r2 += static_cast<double>(v) * v;
      if (r2 > 0) {
        const double raw = p.prefactor * std::pow(r2, -0.5 * p.exponent) *
                           (1.0 + p.correction_c * std::pow(r2, -0.5 * p.correction_delta));
        const double g = model.radial(r2);
        if (g != raw) acc.add((g - raw) * std::pow(r2, 0.5 * q));
      }
      int i = d - 1;
      while (i >= 0 && z[static_cast<std::size_t>(i)] == R) z[static_cast<std::size_t>(i--)] = -R;
      if (i < 0) break;
      ++z[static_cast<std::size_t>(i)];
    }
  }
  const double err = 1e-14 * (std::abs(z_main) + std::abs(z_corr) + 1.0);
  return {acc.value(), err};
}

ExactValue susceptibility_exact(const TwoPointModel& model) { return radial_moment_exact(model, 0); }

double sigma_L(const TwoPointModel& model, int L) {
  if (L < 0) throw DomainError("sigma_L: L must be nonnegative");
  std::vector<AxisWeights> w(static_cast<std::size_t>(model.dim()), overlap_weights(L));
  return weighted_lattice_sum(model, w);
}

double sigma_L_direct(const TwoPointModel& model, int L) {
  const auto sites = LatticeBox(model.dim(), L).sites();
  const std::int64_t n = static_cast<std::int64_t>(sites.size());
  const int d = model.dim();
  return numerics::chunked_sum(n, 1, [&](std::int64_t a) {
    numerics::CompensatedSum row;
    std::vector<int> z(static_cast<std::size_t>(d));
    const auto& x = sites[static_cast<std::size_t>(a)];
    for (const auto& y : sites) {
      for (int i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
      row.add(model(z));
    }
    return row.value();
  });
}

int default_fit_min(std::span<const int> Ls) {
  if (Ls.empty()) return 0;
  int maxL = 0;
  for (int L : Ls) maxL = std::max(maxL, L);
  int cut = static_cast<int>(std::ceil(maxL / 10.0));
  auto count = [&](int c) {
    int n = 0;
    for (int L : Ls) n += L >= c;
    return n;
  };
  while (cut > 1 && count(cut) < 3) cut /= 2;
  return cut;
}

SigmaRatioScan sigma_ratio_scan(const TwoPointModel& model, std::span<const int> Ls, int fit_min_L) {
  SigmaRatioScan scan;
  const auto chi = susceptibility_exact(model);
  scan.chi = chi.value;
  scan.chi_error = chi.error;
  std::vector<double> fx, fy;
  scan.fit_min_L = fit_min_L > 0 ? fit_min_L : default_fit_min(Ls);
  for (int L : Ls) {
    if (L < 1) throw DomainError("sigma_ratio_scan: L must be >= 1");
    SigmaRatioRow row;
    row.L = L;
    row.sigma = sigma_L(model, L);
    const double vol = std::pow(2.0 * L + 1.0, model.dim());
    row.ratio = row.sigma / (scan.chi * vol);
    row.deficit = 1.0 - row.ratio;
    scan.rows.push_back(row);
    if (L >= scan.fit_min_L && row.deficit > 0.0) {
      fx.push_back(L);
      fy.push_back(row.deficit);
    }
  }
  if (fx.size() >= 2) {
    scan.fit = numerics::loglog_fit(fx, fy);
    scan.fitted = true;
    scan.rate_exponent = -scan.fit.slope;
  }
  return scan;
}

}  // namespace lrising::model
