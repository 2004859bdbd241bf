#include "lrising/numerics/fit.hpp"

#include <algorithm>
#include <cmath>

#include "lrising/errors.hpp"

namespace lrising::numerics {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  const std::size_t n = x.size();
  if (n != y.size() || (!w.empty() && w.size() != n)) throw DomainError("linear_fit: size mismatch");
  if (n < 2) throw DomainError("linear_fit: need at least two points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw DomainError("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.n = static_cast<int>(n);
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += wi * r * r;
  }
  fit.residual_rms = std::sqrt(ss / sw);
  const double s2 = n > 2 ? ss / static_cast<double>(n - 2) : 0.0;
  fit.slope_stderr = std::sqrt(s2 / sxx);
  fit.intercept_stderr = std::sqrt(s2 * (1.0 / sw + mx * mx / sxx));
  return fit;
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] == 0.0 || x[i] <= 0.0) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::abs(y[i])));
  }
  return linear_fit(lx, ly);
}

namespace {

struct PowerLs {
  double a, b, ss;
};

PowerLs power_ls(std::span<const double> L, std::span<const double> v, double kappa) {
  std::vector<double> phi(L.size());
  for (std::size_t i = 0; i < L.size(); ++i) phi[i] = std::pow(L[i], -kappa);
  const LinearFit f = linear_fit(phi, v);
  double ss = 0;
  for (std::size_t i = 0; i < L.size(); ++i) {
    const double r = v[i] - f.intercept - f.slope * phi[i];
    ss += r * r;
  }
  return {f.intercept, f.slope, ss};
}

Extrapolation fit_power(std::span<const double> L, std::span<const double> v, double lo, double hi) {
  // Coarse scan first: the residual can be multimodal when the data are nearly linear.
  const int scan = 80;
  double best_k = lo, best_ss = power_ls(L, v, lo).ss;
  for (int i = 1; i <= scan; ++i) {
    const double k = lo + (hi - lo) * i / scan;
    const double ss = power_ls(L, v, k).ss;
    if (ss < best_ss) best_ss = ss, best_k = k;
  }
  double a = std::max(lo, best_k - (hi - lo) / scan), b = std::min(hi, best_k + (hi - lo) / scan);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = power_ls(L, v, c).ss, fd = power_ls(L, v, d).ss;
  for (int it = 0; it < 100 && b - a > 1e-10; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a);
      fc = power_ls(L, v, c).ss;
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a);
      fd = power_ls(L, v, d).ss;
    }
  }
  const double k = 0.5 * (a + b);
  const PowerLs r = power_ls(L, v, k);
  return {r.a, r.b, k, 0.0};
}

}  // namespace

Extrapolation extrapolate_power(std::span<const double> L, std::span<const double> v, double kappa_lo,
                                double kappa_hi) {
  if (L.size() != v.size() || L.size() < 3) throw DomainError("extrapolate_power: need >= 3 points");
  Extrapolation e = fit_power(L, v, kappa_lo, kappa_hi);
  if (L.size() >= 4) {
    const Extrapolation e2 = fit_power(L.subspan(1), v.subspan(1), kappa_lo, kappa_hi);
    e.spread = std::abs(e2.limit - e.limit);
  }
  return e;
}

Extrapolation extrapolate_log(std::span<const double> L, std::span<const double> v) {
  if (L.size() != v.size() || L.size() < 2) throw DomainError("extrapolate_log: need >= 2 points");
  std::vector<double> phi(L.size());
  for (std::size_t i = 0; i < L.size(); ++i) phi[i] = 1.0 / std::log(L[i]);
  const LinearFit f = linear_fit(phi, v);
  Extrapolation e{f.intercept, f.slope, 0.0, 0.0};
  if (L.size() >= 3) {
    const LinearFit f2 = linear_fit(std::span<const double>(phi).subspan(1), v.subspan(1));
    e.spread = std::abs(f2.intercept - f.intercept);
  }
  return e;
}

}  // namespace lrising::numerics
