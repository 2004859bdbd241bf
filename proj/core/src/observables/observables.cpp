#include "lrising/observables/observables.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "lrising/errors.hpp"
#include "lrising/model/lattice_sums.hpp"
#include "lrising/model/susceptibility.hpp"
#include "lrising/numerics/quadrature.hpp"
#include "lrising/numerics/special.hpp"
#include "lrising/numerics/summation.hpp"
#include "lrising/observables/grid.hpp"

namespace lrising::observables {

using model::AxisWeights;
using model::RectBox;
using model::TwoPointModel;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool separable_pair(const TestFunction& f, const TestFunction& g) {
  return f.is_separable() && g.is_separable() && g.has_finite_support();
}

std::vector<double> axis_samples(const TestFunction& f, int axis, int L, int origin, int n, int k = 0) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) v[static_cast<std::size_t>(t)] = f.axis_factor(axis, static_cast<double>(origin + t) / L, k);
  return v;
}

RectBox widened(const RectBox& b, int r) {
  std::vector<int> ext(b.extents);
  model::Point org(b.origin);
  for (std::size_t i = 0; i < ext.size(); ++i) {
    ext[i] += 2 * r;
    org[i] -= r;
  }
  return RectBox(ext, org);
}

// sum_x a(x) sum_y b(y) G(y - x), optionally only over |y - x|_inf <= window.
double direct_double_sum(const TwoPointModel& model, const DenseGrid& a, const DenseGrid& b, int window) {
  const int d = a.box.dim();
  std::vector<model::Point> ys;
  std::vector<double> bv;
  for (std::int64_t j = 0; j < b.box.size(); ++j)
    if (b.values[static_cast<std::size_t>(j)] != 0.0) {
      ys.push_back(b.box.site(j));
      bv.push_back(b.values[static_cast<std::size_t>(j)]);
    }
  return numerics::chunked_sum(a.box.size(), 64, [&](std::int64_t i) {
    const double av = a.values[static_cast<std::size_t>(i)];
    if (av == 0.0) return 0.0;
    const auto x = a.box.site(i);
    numerics::CompensatedSum acc;
    std::vector<int> z(static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < ys.size(); ++j) {
      int linf = 0;
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const int c = ys[j][static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k)];
        z[static_cast<std::size_t>(k)] = c;
        linf = std::max(linf, std::abs(c));
        r2 += static_cast<double>(c) * c;
      }
      if (window > 0 && linf > window) continue;
      const double G = model.is_synthetic() ? model.radial(r2) : model(z);
      acc.add(bv[j] * G);
    }
    return av * acc.value();
  });
}

void mask_window(DenseGrid& c, int window) {
  const int d = c.box.dim();
  for (std::int64_t i = 0; i < c.box.size(); ++i) {
    const auto z = c.box.site(i);
    for (int k = 0; k < d; ++k)
      if (std::abs(z[static_cast<std::size_t>(k)]) > window) {
        c.values[static_cast<std::size_t>(i)] = 0.0;
        break;
      }
  }
}

// sum_z G(z) C_fg(z); window > 0 restricts to |z|_inf <= window (needed when g is unbounded).
double compact_sum(const TestFunction& f, const TestFunction& g, int L, const TwoPointModel& model, Path path,
                   int window) {
  if (f.dim() != g.dim() || f.dim() != model.dim()) throw DomainError("dimension mismatch between f, g and model");
  if (!f.has_finite_support()) throw CapabilityError("f must have finite (or effective) support");
  if (path == Path::Auto) path = (window == 0 && separable_pair(f, g)) ? Path::Separable : Path::Fourier;
  const RectBox fb = lattice_support(f, L);
  if (path == Path::Separable) {
    if (!separable_pair(f, g)) throw CapabilityError("separable path needs separable f and g");
    const RectBox gb = lattice_support(g, L);
    std::vector<AxisWeights> w;
    for (int i = 0; i < f.dim(); ++i) {
      const auto k = static_cast<std::size_t>(i);
      w.push_back(cross_correlate_axis(axis_samples(f, i, L, fb.origin[k], fb.extents[k]), fb.origin[k],
                                       axis_samples(g, i, L, gb.origin[k], gb.extents[k]), gb.origin[k]));
    }
    return model::weighted_lattice_sum(model, w);
  }
  const RectBox gb = window > 0 ? widened(fb, window) : lattice_support(g, L);
  const DenseGrid fa = sample(f, L, fb), ga = sample(g, L, gb);
  if (path == Path::Direct) return direct_double_sum(model, fa, ga, window);
  DenseGrid c = cross_correlate_fft(fa, ga);
  if (window > 0) mask_window(c, window);
  return grid_sum(model, c);
}

// The even multi-indices entering the Taylor subtraction of order m.
std::vector<MultiIndex> taylor_indices(int d, int m) {
  std::vector<MultiIndex> out;
  for (int j = 0; j <= m; j += 2)
    for (auto& g : testfn::multi_indices(d, j))
      if (g.all_even()) out.push_back(g);
  return out;
}

// D_gamma = sum_x f(x/L) d^gamma g(x/L) for each gamma.
std::vector<double> derivative_pairings(const TestFunction& f, const TestFunction& g, int L,
                                        const std::vector<MultiIndex>& gammas, int m) {
  const int d = f.dim();
  const RectBox fb = lattice_support(f, L);
  std::vector<double> out(gammas.size(), 0.0);
  if (f.is_separable() && g.is_separable()) {
    for (std::size_t q = 0; q < gammas.size(); ++q) {
      double prod = 1.0;
      for (int i = 0; i < d; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const auto fa = axis_samples(f, i, L, fb.origin[k], fb.extents[k]);
        const auto ga = axis_samples(g, i, L, fb.origin[k], fb.extents[k], gammas[q][i]);
        numerics::CompensatedSum s;
        for (std::size_t t = 0; t < fa.size(); ++t) s.add(fa[t] * ga[t]);
        prod *= s.value();
      }
      out[q] = prod;
    }
    return out;
  }
  for (std::size_t q = 0; q < gammas.size(); ++q) {
    out[q] = numerics::chunked_sum(fb.size(), 256, [&](std::int64_t i) {
      const auto p = fb.site(i);
      std::vector<double> x(static_cast<std::size_t>(d));
      for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = static_cast<double>(p[static_cast<std::size_t>(k)]) / L;
      const double fv = f(x);
      if (fv == 0.0) return 0.0;
      return fv * (m == 0 ? g(x) : g.derivative(gammas[q], x));
    });
  }
  return out;
}

// 2 sum_k int_{[-1,1]^{d-1}} u^gamma |u|^-p dv with u_k = 1: the integral of y^gamma |y|^-p
// over the boundary of the unit cube, for even gamma.
double cube_surface_integral(const MultiIndex& gamma, double p) {
  const int d = gamma.dim();
  const auto rule = numerics::gauss_legendre(24, 0.0, 1.0);
  const int n = static_cast<int>(rule.size());
  double total = 0.0;
  for (int face = 0; face < d; ++face) {
    std::vector<int> idx(static_cast<std::size_t>(std::max(d - 1, 0)), 0);
    numerics::CompensatedSum acc;
    while (true) {
      double w = 1.0, r2 = 1.0, mono = 1.0;
      int slot = 0;
      for (int k = 0; k < d; ++k) {
        if (k == face) continue;
        const double v = rule.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(slot)])];
        w *= 2.0 * rule.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(slot)])];
        r2 += v * v;
        mono *= std::pow(v, gamma[k]);
        ++slot;
      }
      acc.add(w * mono * std::pow(r2, -0.5 * p));
      int k = 0;
      while (k < d - 1 && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k++)] = 0;
      if (k == d - 1) break;
    }
    total += 2.0 * acc.value();
  }
  return total;
}

void check_convergent(const TwoPointModel& model, const MultiIndex& gamma) {
  const auto p = model.decay_exponent();
  if (p && gamma.order() >= *p - model.dim())
    throw DivergenceError("kernel_moment: |gamma| = " + std::to_string(gamma.order()) +
                          " is not below exponent - d = " + std::to_string(*p - model.dim()));
}

}  // namespace

double smeared_value(const SmearedObservableSpec& spec, const model::SpinConfiguration& spins) {
  const auto& f = spec.f;
  const int d = f.dim();
  if (spins.box.dim() != d) throw DomainError("smeared_value: dimension mismatch");
  if (!(spec.sigma > 0.0)) throw DomainError("smeared_value: Sigma_L must be positive");
  const RectBox fb = lattice_support(f, spec.L);
  numerics::CompensatedSum acc;
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::int64_t i = 0; i < fb.size(); ++i) {
    const auto p = fb.site(i);
    for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = static_cast<double>(p[static_cast<std::size_t>(k)]) / spec.L;
    const double v = f(x);
    if (v == 0.0) continue;
    if (!spins.box.contains(p)) throw CoverageError("smeared_value: configuration does not cover the support of f(./L)");
    acc.add(v * spins.at(p));
  }
  return std::pow(2.0, 0.5 * d) / std::sqrt(spec.sigma) * acc.value();
}

double covariance(const TestFunction& f, const TestFunction& g, int L, const TwoPointModel& model, Path path) {
  const double s = compact_sum(f, g, L, model, path, 0);
  return std::ldexp(1.0, f.dim()) / model::sigma_L(model, L) * s;
}

double l2_inner_product(const TestFunction& f, const TestFunction& g, int panels) {
  const int d = f.dim();
  if (g.dim() != d) throw DomainError("l2_inner_product: dimension mismatch");
  if (!f.has_finite_support() && !g.has_finite_support())
    throw CapabilityError("l2_inner_product: one function must have finite support");
  std::vector<numerics::Rule1D> rules;
  for (int i = 0; i < d; ++i) {
    double lo = -kInf, hi = kInf;
    for (const auto* h : {&f, &g})
      if (h->has_finite_support()) {
        const auto [a, b] = h->axis_support(i);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
      }
    if (!(hi > lo)) return 0.0;
    rules.push_back(numerics::composite_gauss_legendre(12, panels, lo, hi));
  }
  if (f.is_separable() && g.is_separable()) {
    double prod = 1.0;
    for (int i = 0; i < d; ++i) {
      numerics::CompensatedSum s;
      const auto& r = rules[static_cast<std::size_t>(i)];
      for (std::size_t q = 0; q < r.size(); ++q)
        s.add(r.weights[q] * f.axis_factor(i, r.nodes[q], 0) * g.axis_factor(i, r.nodes[q], 0));
      prod *= s.value();
    }
    return prod;
  }
  const auto n0 = static_cast<std::int64_t>(rules[0].size());
  return numerics::chunked_sum(n0, 1, [&](std::int64_t i0) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    idx[0] = static_cast<std::size_t>(i0);
    std::vector<double> x(static_cast<std::size_t>(d));
    numerics::CompensatedSum acc;
    while (true) {
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        x[static_cast<std::size_t>(k)] = rules[static_cast<std::size_t>(k)].nodes[idx[static_cast<std::size_t>(k)]];
        w *= rules[static_cast<std::size_t>(k)].weights[idx[static_cast<std::size_t>(k)]];
      }
      acc.add(w * f(x) * g(x));
      int k = d - 1;
      while (k >= 1 && ++idx[static_cast<std::size_t>(k)] == rules[static_cast<std::size_t>(k)].size())
        idx[static_cast<std::size_t>(k--)] = 0;
      if (k < 1) break;
    }
    return acc.value();
  });
}

KernelMoment kernel_moment(const TwoPointModel& model, const MultiIndex& gamma, int r_cut) {
  if (gamma.dim() != model.dim()) throw DomainError("kernel_moment: dimension mismatch");
  if (r_cut < 0) throw DomainError("kernel_moment: R_cut must be nonnegative");
  KernelMoment out;
  out.r_cut = r_cut;
  if (gamma.any_odd()) return out;
  check_convergent(model, gamma);

  std::vector<AxisWeights> w;
  for (int i = 0; i < gamma.dim(); ++i) {
    AxisWeights a(static_cast<std::size_t>(2 * r_cut + 1));
    for (int k = -r_cut; k <= r_cut; ++k) a[static_cast<std::size_t>(k + r_cut)] = std::pow(static_cast<double>(k), gamma[i]);
    w.push_back(std::move(a));
  }
  out.partial = model::weighted_lattice_sum(model, w);

  if (model.is_synthetic()) {
    const auto& sp = model.synthetic_params();
    const double a = r_cut + 0.5, d = sp.d, q = gamma.order();
    auto piece = [&](double p) { return std::pow(a, d + q - p) / (p - d - q) * cube_surface_integral(gamma, p); };
    out.tail_estimate = sp.prefactor * piece(sp.exponent);
    if (sp.correction_c != 0.0)
      out.tail_estimate += sp.prefactor * sp.correction_c * piece(sp.exponent + sp.correction_delta);
    out.tail_bound = model::synthetic_tail_bound(model, gamma.order(), r_cut);
  } else {
    const int s = model.support_radius();
    if (s < 0) {
      out.tail_bound = kInf;
    } else if (s > r_cut) {
      out.tail_estimate = kernel_moment(model, gamma, s).partial - out.partial;
    }
  }
  return out;
}

MomentValue full_kernel_moment(const TwoPointModel& model, const MultiIndex& gamma, int r_cut) {
  if (gamma.any_odd()) return {};
  check_convergent(model, gamma);
  if (!model.is_synthetic() && model.support_radius() >= 0)
    return {kernel_moment(model, gamma, model.support_radius()).partial, 0.0};
  if (model.is_synthetic()) {
    int nonzero = 0;
    for (int i = 0; i < gamma.dim(); ++i) nonzero += gamma[i] != 0;
    if (gamma.order() == 0 || (gamma.order() == 2 && nonzero == 1)) {
      const auto e = model::radial_moment_exact(model, gamma.order());
      const double div = gamma.order() == 0 ? 1.0 : gamma.dim();
      return {e.value / div, e.error / div};
    }
  }
  const auto km = kernel_moment(model, gamma, r_cut);
  return {km.value(), km.tail_bound};
}

PairResult renormalized_pair_expectation(const RenormalizedPairSpec& spec, const TwoPointModel& model, Path path) {
  const auto& f = spec.f;
  const auto& g = spec.g;
  if (!(spec.alpha > 0.0)) throw DomainError("renormalized pair: alpha must be positive");
  if (spec.L < 1) throw DomainError("renormalized pair: L must be positive");
  PairResult out;
  out.taylor_order = testfn::floor2(spec.alpha);
  const int m = out.taylor_order;
  if (m > g.max_derivative_order()) throw CapabilityError("renormalized pair: g lacks derivatives of order floor2(alpha)");
  const bool windowed = !g.has_finite_support();
  out.r_cut = spec.r_cut;
  if (out.r_cut <= 0) {
    const double reach = windowed ? 2.0 * f.support_radius() : f.support_radius() + g.support_radius();
    out.r_cut = std::max(64, static_cast<int>(std::ceil(spec.L * reach)));
  }
  const int d = f.dim();
  out.sigma = model::sigma_L(model, spec.L);
  out.compact = compact_sum(f, g, spec.L, model, path, windowed ? out.r_cut : 0);

  const auto gammas = taylor_indices(d, m);
  std::vector<double> D;
  if (path == Path::Direct) {
    // Per-site derivatives, bypassing the separable shortcut.
    const RectBox fb = lattice_support(f, spec.L);
    D.assign(gammas.size(), 0.0);
    for (std::size_t q = 0; q < gammas.size(); ++q) {
      numerics::CompensatedSum s;
      std::vector<double> x(static_cast<std::size_t>(d));
      for (std::int64_t i = 0; i < fb.size(); ++i) {
        const auto p = fb.site(i);
        for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = static_cast<double>(p[static_cast<std::size_t>(k)]) / spec.L;
        s.add(f(x) * g.derivative(gammas[q], x));
      }
      D[q] = s.value();
    }
  } else {
    D = derivative_pairings(f, g, spec.L, gammas, m);
  }

  numerics::CompensatedSum moment, tail;
  double bound = 0.0;
  for (std::size_t q = 0; q < gammas.size(); ++q) {
    const double scale = D[q] / (gammas[q].factorial() * std::pow(static_cast<double>(spec.L), gammas[q].order()));
    if (windowed) {
      const auto km = kernel_moment(model, gammas[q], out.r_cut);
      moment.add(scale * km.partial);
      tail.add(scale * km.tail_estimate);
      bound += std::abs(scale) * km.tail_bound;
    } else {
      const auto mv = full_kernel_moment(model, gammas[q], out.r_cut);
      moment.add(scale * mv.value);
      bound += std::abs(scale) * mv.error;
    }
  }
  out.moment = moment.value() + tail.value();
  const double norm = std::ldexp(1.0, d) / out.sigma;
  out.value = norm * (out.compact - out.moment);
  out.tail_bound = norm * bound;
  return out;
}

ScalingTable scaling_sequence(const TestFunction& f, const TestFunction& g, double alpha, const TwoPointModel& model,
                              const std::vector<int>& Ls, Path path) {
  if (!(alpha > 0.0)) throw DomainError("scaling_sequence: alpha must be positive");
  for (std::size_t i = 1; i < Ls.size(); ++i)
    if (Ls[i] <= Ls[i - 1]) throw DomainError("scaling_sequence: L values must be increasing");
  ScalingTable out;
  out.log_branch = numerics::is_even_positive_integer(alpha, 1e-12);
  for (int L : Ls) {
    if (out.log_branch && L == 1) throw DomainError("scaling_sequence: L = 1 is excluded for even alpha (log 1 = 0)");
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = renormalized_pair_expectation({f, g, alpha, L, 0}, model, path);
    const auto t1 = std::chrono::steady_clock::now();
    double factor = std::pow(static_cast<double>(L), alpha);
    if (out.log_branch) factor /= std::log(static_cast<double>(L));
    out.rows.push_back({L, r.value, factor * r.value, factor * r.tail_bound,
                        std::chrono::duration<double, std::milli>(t1 - t0).count()});
  }
  std::vector<double> xs, ys;
  for (const auto& r : out.rows) {
    xs.push_back(r.L);
    ys.push_back(r.rescaled);
  }
  if (out.log_branch && xs.size() >= 2) {
    // Richardson in 1 / log L on the three largest sizes; smaller L carry the
    // log log L / log L drift.
    const std::size_t k = std::min<std::size_t>(3, xs.size());
    out.extrapolation = numerics::extrapolate_log(std::span<const double>(xs).last(k), std::span<const double>(ys).last(k));
    out.extrapolated = true;
  } else if (!out.log_branch && xs.size() >= 3) {
    out.extrapolation = numerics::extrapolate_power(xs, ys);
    out.extrapolated = true;
  }
  return out;
}

}  // namespace lrising::observables
