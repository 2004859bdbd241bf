#include "lrising/experiments/runners.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>

#include <gsl/gsl_sf_gamma.h>

#include "lrising/errors.hpp"
#include "lrising/fgff/fgff.hpp"
#include "lrising/mc/enumerate.hpp"
#include "lrising/mc/estimate.hpp"
#include "lrising/model/susceptibility.hpp"
#include "lrising/numerics/fit.hpp"
#include "lrising/numerics/rng.hpp"
#include "lrising/numerics/special.hpp"
#include "lrising/observables/observables.hpp"
#include "lrising/testfn/multi_index.hpp"

namespace lrising::experiments {
namespace {

using numerics::kPi;
using testfn::TestFunction;

ReportTable start(const ExperimentConfig& cfg, std::string statement, std::vector<std::string> columns) {
  cfg.validate();
  ReportTable t;
  t.experiment = cfg.name;
  t.kind = std::string(kind_name(cfg.kind));
  t.statement = std::move(statement);
  t.tool_version = tool_version();
  t.config_hash = config_hash(cfg);
  t.config = config_to_json(cfg);
  t.columns = std::move(columns);
  return t;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string case_label(int d, double alpha) { return "d=" + std::to_string(d) + ",alpha=" + format_double(alpha); }

ModelDecl model_for(const ExperimentConfig& cfg, int d, double alpha) {
  ModelDecl m = cfg.model;
  m.d = d;
  m.alpha = alpha;
  return m;
}

std::vector<int> dims_of(const ExperimentConfig& cfg) {
  return cfg.dims.empty() ? std::vector<int>{cfg.model.d} : cfg.dims;
}
std::vector<double> alphas_of(const ExperimentConfig& cfg) {
  return cfg.alphas.empty() ? std::vector<double>{cfg.model.alpha} : cfg.alphas;
}

std::pair<TestFunction, TestFunction> pair_of(const ExperimentConfig& cfg, int d) {
  const auto f = cfg.functions.at(0).build(d);
  const auto g = cfg.functions.size() > 1 ? cfg.functions[1].build(d) : f;
  return {f, g};
}

void require_synthetic(const ExperimentConfig& cfg) {
  if (cfg.model.type != "synthetic")
    throw ConfigError(std::string(kind_name(cfg.kind)) + ": the continuum target needs the synthetic model");
}

// L values inside the fit window: L >= fit_min_L when set, otherwise the largest decade.
std::vector<std::size_t> fit_window(const ExperimentConfig& cfg) {
  const double lmax = cfg.L.back();
  const double lo = cfg.fit_min_L > 0 ? cfg.fit_min_L : lmax / 10.0;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < cfg.L.size(); ++i)
    if (cfg.L[i] >= lo) idx.push_back(i);
  return idx;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) { return numerics::CounterRng(seed).at(stream); }

mc::ChainConfig chain_for(const ExperimentConfig& cfg, std::uint64_t seed, mc::Sampler s) {
  mc::ChainConfig c;
  c.seed = seed;
  c.thermalization = cfg.mc.thermalization;
  c.measurement = cfg.mc.measurement;
  c.sampler = s;
  c.stride = cfg.mc.stride;
  c.validate();
  return c;
}

model::InteractionSpec coupling_for(const ExperimentConfig& cfg, int d) {
  model::InteractionSpec s{d, cfg.model.alpha, cfg.model.amplitude.value_or(1.0)};
  s.validate();
  return s;
}

model::RectBox centred_box(const std::vector<int>& ext) {
  model::Point origin;
  for (int e : ext) origin.push_back(-(e / 2));
  return model::RectBox(ext, origin);
}

// Every multi-index with 1 <= |gamma| <= order.
std::vector<testfn::MultiIndex> indices_up_to(int d, int order) {
  std::vector<testfn::MultiIndex> out;
  for (int k = 1; k <= order; ++k)
    for (auto& g : testfn::multi_indices(d, k)) out.push_back(std::move(g));
  return out;
}

// Sphere average of u^gamma from the Gamma-function form, evaluated with GSL.
double sphere_average_gamma(const testfn::MultiIndex& g, int d) {
  if (g.any_odd()) return 0.0;
  double log_num = gsl_sf_lngamma(0.5 * d) - 0.5 * d * std::log(kPi);
  for (int i = 0; i < d; ++i) log_num += gsl_sf_lngamma(0.5 * (g[i] + 1));
  return std::exp(log_num - gsl_sf_lngamma(0.5 * (g.order() + d)));
}

// sum over x in Z^d of f(x/L)^2, per axis when f is separable.
double lattice_square_sum(const TestFunction& f, int L) {
  const int d = f.dim();
  std::vector<std::pair<long, long>> range;
  for (int i = 0; i < d; ++i) {
    const auto [lo, hi] = f.axis_support(i);
    range.push_back({static_cast<long>(std::ceil(lo * L)), static_cast<long>(std::floor(hi * L))});
  }
  if (f.is_separable()) {
    double prod = 1.0;
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (long k = range[static_cast<std::size_t>(i)].first; k <= range[static_cast<std::size_t>(i)].second; ++k) {
        const double v = f.axis_factor(i, static_cast<double>(k) / L);
        s += v * v;
      }
      prod *= s;
    }
    return prod;
  }
  std::vector<long> k(static_cast<std::size_t>(d));
  std::vector<double> x(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) k[static_cast<std::size_t>(i)] = range[static_cast<std::size_t>(i)].first;
  double s = 0.0;
  while (true) {
    for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(k[static_cast<std::size_t>(i)]) / L;
    const double v = f(x);
    s += v * v;
    int i = d - 1;
    while (i >= 0 && ++k[static_cast<std::size_t>(i)] > range[static_cast<std::size_t>(i)].second) {
      k[static_cast<std::size_t>(i)] = range[static_cast<std::size_t>(i)].first;
      --i;
    }
    if (i < 0) break;
  }
  return s;
}

}  // namespace

std::vector<std::vector<int>> box_shapes(int d, int max_sites) {
  std::vector<std::vector<int>> out;
  std::vector<int> ext(static_cast<std::size_t>(d), 1);
  // Nondecreasing extents, enumerated odometer style.
  std::function<void(int, int, int)> rec = [&](int axis, int min_side, int prod) {
    if (axis == d) {
      if (prod >= 2) out.push_back(ext);
      return;
    }
    for (int s = min_side; prod * s <= max_sites; ++s) {
      ext[static_cast<std::size_t>(axis)] = s;
      rec(axis + 1, s, prod * s);
    }
  };
  rec(0, 1, 1);
  return out;
}

std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> pair_orbits(const model::RectBox& box) {
  const int d = box.dim();
  const std::int64_t n = box.size();
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::int64_t>> maps;
  do {
    bool ok = true;
    for (int i = 0; i < d; ++i) ok = ok && box.extents[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] ==
                                               box.extents[static_cast<std::size_t>(i)];
    if (!ok) continue;
    for (int flips = 0; flips < (1 << d); ++flips) {
      std::vector<std::int64_t> m(static_cast<std::size_t>(n));
      for (std::int64_t s = 0; s < n; ++s) {
        const auto p = box.site(s);
        model::Point q(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) {
          const auto src = static_cast<std::size_t>(perm[static_cast<std::size_t>(i)]);
          const int lo = box.origin.empty() ? 0 : box.origin[src];
          int rel = p[src] - lo;
          if (flips >> i & 1) rel = box.extents[src] - 1 - rel;
          q[static_cast<std::size_t>(i)] = (box.origin.empty() ? 0 : box.origin[static_cast<std::size_t>(i)]) + rel;
        }
        m[static_cast<std::size_t>(s)] = box.index(q);
      }
      maps.push_back(std::move(m));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::pair<std::int64_t, std::int64_t>>> orbits;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j) {
      std::pair<std::int64_t, std::int64_t> rep{n, n};
      for (const auto& m : maps) {
        auto a = m[static_cast<std::size_t>(i)], b = m[static_cast<std::size_t>(j)];
        if (a > b) std::swap(a, b);
        rep = std::min(rep, std::pair{a, b});
      }
      orbits[rep].push_back({i, j});
    }
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> out;
  for (auto& [rep, pairs] : orbits) out.push_back(std::move(pairs));
  return out;
}

ReportTable run_wn_covariance(const ExperimentConfig& cfg) {
  auto t = start(cfg, "covariance of smeared spins tends to the L2 product of the test functions",
                 {"case", "d", "alpha", "L", "covariance", "target", "gap", "abs_gap"});
  PlotSpec plot{"|covariance - int f g| against L", "L", {"abs_gap"}, "case", {}};
  const auto lo_factor = cfg.maybe_threshold("exponent_lo_factor");
  const auto hi_factor = cfg.maybe_threshold("exponent_hi_factor");
  const auto norm_tol = cfg.maybe_threshold("normalization_tol");
  const auto gap_tol = cfg.maybe_threshold("gap_tol");
  auto& cases = t.summary["cases"] = nlohmann::ordered_json::array();

  for (int d : dims_of(cfg))
    for (double alpha : alphas_of(cfg)) {
      const auto decl = model_for(cfg, d, alpha);
      const auto model = decl.build();
      const auto [f, g] = pair_of(cfg, d);
      const double target = observables::l2_inner_product(f, g);
      const std::string label = case_label(d, alpha);
      std::vector<double> gaps;
      double max_norm_dev = 0.0;
      for (int L : cfg.L) {
        const double c = observables::covariance(f, g, L, model);
        gaps.push_back(std::abs(c - target));
        max_norm_dev = std::max(max_norm_dev, std::abs(c - 1.0));
        t.add_row({label, std::int64_t{d}, alpha, std::int64_t{L}, c, target, c - target, std::abs(c - target)});
      }
      nlohmann::ordered_json entry{{"case", label}, {"target", target}};
      const double max_gap = *std::max_element(gaps.begin(), gaps.end());
      if (max_gap <= 1e-13 * std::max(1.0, std::abs(target))) {
        entry["fit"] = "skipped: gap vanishes for every L";
      } else {
        const auto idx = fit_window(cfg);
        std::vector<double> xs, ys;
        for (auto i : idx)
          if (gaps[i] > 0.0) {
            xs.push_back(cfg.L[i]);
            ys.push_back(gaps[i]);
          }
        if (xs.size() < 2) {
          entry["fit"] = "skipped: fewer than two nonzero gaps in the window";
        } else {
          const auto fit = numerics::loglog_fit(xs, ys);
          const double expo = -fit.slope;
          const double ref = alpha / (alpha + 1.0);
          entry["fit_L"] = xs;
          entry["exponent"] = expo;
          entry["exponent_ci95"] = {expo - 1.96 * fit.slope_stderr, expo + 1.96 * fit.slope_stderr};
          entry["reference"] = ref;
          plot.notes.push_back(label + ": exponent " + fmt("%.3f", expo) + " (ref " + fmt("%.3f", ref) + ")");
          if (lo_factor && hi_factor)
            t.check("exponent[" + label + "]", expo, *lo_factor * ref, *hi_factor * ref,
                    "fit over L >= " + format_double(xs.front()));
        }
      }
      if (norm_tol) t.check("normalization[" + label + "]", max_norm_dev, 0.0, *norm_tol, "max over L of |covariance - 1|");
      if (gap_tol) t.check("gap[" + label + "]", gaps.back(), 0.0, *gap_tol, "at the largest L");
      cases.push_back(std::move(entry));
    }
  t.plots.push_back(std::move(plot));
  return t;
}

ReportTable run_sigma_ratio(const ExperimentConfig& cfg) {
  auto t = start(cfg, "variance of the box total spin over chi |Lambda_L| tends to 1",
                 {"L", "sigma", "ratio", "deficit"});
  const auto model = cfg.model.build();
  const auto scan = model::sigma_ratio_scan(model, cfg.L, cfg.fit_min_L);
  for (const auto& r : scan.rows) t.add_row({std::int64_t{r.L}, r.sigma, r.ratio, r.deficit});
  const double ref = cfg.model.alpha / (cfg.model.alpha + 1.0);
  t.summary["chi"] = scan.chi;
  t.summary["chi_error"] = scan.chi_error;
  t.summary["fit_min_L"] = scan.fit_min_L;
  t.summary["rate_exponent"] = scan.rate_exponent;
  t.summary["rate_stderr"] = scan.fit.slope_stderr;
  t.summary["reference_exponent"] = ref;
  t.check("ratio_at_largest_L", scan.rows.back().ratio, cfg.threshold("ratio_lo"), 1.0,
          "L = " + std::to_string(scan.rows.back().L));
  const double tol = cfg.threshold("exponent_tol");
  t.check("rate_exponent", scan.fitted ? scan.rate_exponent : std::nan(""), ref - tol, ref + tol,
          "fit of log deficit against log L");
  t.plots.push_back({"Sigma_L deficit against L", "L", {"deficit"}, "",
                     {"rate " + fmt("%.3f", scan.rate_exponent) + " (ref " + fmt("%.3f", ref) + ")"}});
  return t;
}

ReportTable run_fgff_limit(const ExperimentConfig& cfg) {
  auto t = start(cfg, "L^alpha times the renormalized pair tends to (A/chi) times the fractional-field kernel",
                 {"L", "raw", "rescaled", "target", "rel_gap", "tail_bound"});
  require_synthetic(cfg);
  const double alpha = cfg.model.alpha;
  if (numerics::is_even_positive_integer(alpha))
    throw ConfigError("fgff-limit: even alpha takes the logarithmic branch (use fgff-limit-log)");
  const int d = cfg.model.d;
  const auto model = cfg.model.build();
  const auto [f, g] = pair_of(cfg, d);
  const auto chi = model::susceptibility_exact(model);
  const double A = cfg.model.resolved_amplitude();
  const auto kt = fgff::k_tilde(f, g, alpha, cfg.quadrature.build());
  const double target = A / chi.value * kt.value;
  const auto seq = observables::scaling_sequence(f, g, alpha, model, cfg.L);
  for (const auto& r : seq.rows)
    t.add_row({std::int64_t{r.L}, r.raw, r.rescaled, target, r.rescaled / target - 1.0, r.tail_bound});

  const double kernel_rel = std::abs(kt.error / kt.value);
  t.summary["amplitude"] = A;
  t.summary["chi"] = chi.value;
  t.summary["k_tilde"] = kt.value;
  t.summary["k_tilde_error"] = kt.error;
  t.summary["target"] = target;
  if (seq.extrapolated) {
    t.summary["extrapolated"] = seq.extrapolation.limit;
    t.summary["extrapolated_rel_gap"] = seq.extrapolation.limit / target - 1.0;
    t.summary["extrapolation_exponent"] = seq.extrapolation.exponent;
  }
  const double gap = std::abs(seq.rows.back().rescaled / target - 1.0);
  const double gap_tol = cfg.threshold("gap_tol");
  t.check("rel_gap_at_largest_L", gap, 0.0, gap_tol, "L = " + std::to_string(seq.rows.back().L));
  t.check("kernel_rel_error", kernel_rel, 0.0, cfg.threshold("kernel_tol"), "quadrature error estimate");
  if (const auto et = cfg.maybe_threshold("extrapolation_tol"))
    t.check("extrapolated_rel_gap", seq.extrapolated ? std::abs(seq.extrapolation.limit / target - 1.0) : std::nan(""),
            0.0, *et);
  t.plots.push_back({"relative gap to the continuum kernel", "L", {"rel_gap"}, "",
                     {case_label(d, alpha), "gap at L max " + fmt("%.3g", gap)}});
  return t;
}

ReportTable run_fgff_limit_log(const ExperimentConfig& cfg) {
  auto t = start(cfg, "(L^alpha / log L) times the renormalized pair tends to (A/chi) H_j int f Laplacian^j g",
                 {"L", "raw", "rescaled", "target", "rel_gap", "tail_bound"});
  require_synthetic(cfg);
  const double alpha = cfg.model.alpha;
  const int j = static_cast<int>(std::lround(alpha / 2.0));
  const int d = cfg.model.d;
  const auto model = cfg.model.build();
  const auto [f, g] = pair_of(cfg, d);
  const auto chi = model::susceptibility_exact(model);
  const double A = cfg.model.resolved_amplitude();
  const double H = fgff::constant_H(j, d);
  const auto lap = fgff::laplacian_pairing(f, g, j, cfg.quadrature.build());
  const double target = A / chi.value * H * lap.value;
  const auto seq = observables::scaling_sequence(f, g, alpha, model, cfg.L);
  for (const auto& r : seq.rows)
    t.add_row({std::int64_t{r.L}, r.raw, r.rescaled, target, r.rescaled / target - 1.0, r.tail_bound});

  // Monotone approach: |gap| must not grow from one L to the next (from monotone_from_L on).
  const int from = static_cast<int>(cfg.maybe_threshold("monotone_from_L").value_or(0.0));
  int violations = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& r : seq.rows) {
    if (r.L < from) continue;
    const double gap = std::abs(r.rescaled / target - 1.0);
    if (gap > prev) ++violations;
    prev = gap;
  }
  const double band = std::abs(seq.rows.back().rescaled / target - 1.0);
  const double ext = seq.extrapolated ? std::abs(seq.extrapolation.limit / target - 1.0) : std::nan("");
  t.summary["amplitude"] = A;
  t.summary["chi"] = chi.value;
  t.summary["H_j"] = H;
  t.summary["laplacian_pairing"] = lap.value;
  t.summary["target"] = target;
  t.summary["extrapolated"] = seq.extrapolated ? nlohmann::ordered_json(seq.extrapolation.limit) : nlohmann::ordered_json(nullptr);
  t.check("monotone_violations", violations, 0, 0, "count of L where |gap| grows");
  t.check("rel_gap_at_largest_L", band, 0.0, cfg.threshold("band_tol"), "L = " + std::to_string(seq.rows.back().L));
  t.check("extrapolated_rel_gap", ext, 0.0, cfg.threshold("extrapolation_tol"),
          "a + b / log L through the three largest L");
  t.plots.push_back({"relative gap to the Laplacian target", "L", {"rel_gap"}, "",
                     {case_label(d, alpha), "extrapolated gap " + fmt("%.3g", ext)}});
  return t;
}

ReportTable run_kernel_identity(const ExperimentConfig& cfg) {
  auto t = start(cfg, "full-Taylor and Pizzetti kernels agree; sphere moments match their closed form",
                 {"check", "d", "alpha", "j", "value", "reference", "discrepancy"});
  const auto quad = cfg.quadrature.build();
  double kernel_max = 0.0, pizzetti_max = 0.0, formula_max = 0.0, sigma_max = 0.0;

  for (int d : dims_of(cfg))
    for (double alpha : cfg.alphas) {
      const auto [f, g] = pair_of(cfg, d);
      const double disc = fgff::kernel_equality_check(f, g, alpha, quad);
      kernel_max = std::max(kernel_max, disc);
      t.add_row({"kernel", std::int64_t{d}, alpha, Cell{}, Cell{}, Cell{}, disc});
    }

  const std::array<std::array<double, 3>, 3> points{{{0.0, 0.0, 0.0}, {0.3, -0.2, 0.1}, {0.7, 0.4, -0.5}}};
  for (int d : dims_of(cfg)) {
    const auto g = cfg.functions.at(0).build(d);
    for (int j = 0; j <= 3; ++j)
      for (const auto& p : points) {
        const auto r = fgff::pizzetti_reduce(g, j, std::span<const double>(p.data(), static_cast<std::size_t>(d)));
        const double disc = std::abs(r.difference) / std::max(1.0, std::abs(r.laplacian_side));
        pizzetti_max = std::max(pizzetti_max, disc);
        t.add_row({"pizzetti", std::int64_t{d}, Cell{}, std::int64_t{j}, r.multi_index_side, r.laplacian_side, disc});
      }
  }

  // Sphere moments: closed form against the Gamma-function form and a Monte Carlo average.
  const std::int64_t n = cfg.mc.sphere_samples;
  for (int d : dims_of(cfg)) {
    const auto idx = indices_up_to(d, 6);
    double trace = 0.0;
    for (int i = 0; i < d; ++i) {
      std::vector<int> e(static_cast<std::size_t>(d), 0);
      e[static_cast<std::size_t>(i)] = 2;
      trace += fgff::spherical_moment(testfn::MultiIndex(e), d);
    }
    formula_max = std::max(formula_max, std::abs(trace - 1.0));
    t.add_row({"moment-trace", std::int64_t{d}, Cell{}, Cell{}, trace, 1.0, std::abs(trace - 1.0)});

    numerics::CounterRng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(d)));
    std::vector<double> sum(idx.size(), 0.0), sum2(idx.size(), 0.0);
    std::array<std::array<double, 7>, 3> pw{};
    for (std::int64_t s = 0; s < n; ++s) {
      std::array<double, 4> z{};
      for (int k = 0; k < d; k += 2) {
        const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        z[static_cast<std::size_t>(k)] = rad * std::cos(2.0 * kPi * u2);
        z[static_cast<std::size_t>(k) + 1] = rad * std::sin(2.0 * kPi * u2);
      }
      double norm = 0.0;
      for (int k = 0; k < d; ++k) norm += z[static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(k)];
      norm = std::sqrt(norm);
      for (int k = 0; k < d; ++k) {
        auto& row = pw[static_cast<std::size_t>(k)];
        row[0] = 1.0;
        const double u = z[static_cast<std::size_t>(k)] / norm;
        for (int e = 1; e <= 6; ++e) row[static_cast<std::size_t>(e)] = row[static_cast<std::size_t>(e) - 1] * u;
      }
      for (std::size_t m = 0; m < idx.size(); ++m) {
        double v = 1.0;
        for (int k = 0; k < d; ++k) v *= pw[static_cast<std::size_t>(k)][static_cast<std::size_t>(idx[m][k])];
        sum[m] += v;
        sum2[m] += v * v;
      }
    }
    for (std::size_t m = 0; m < idx.size(); ++m) {
      const double closed = fgff::spherical_moment(idx[m], d);
      const double gamma_form = sphere_average_gamma(idx[m], d);
      const double rel = std::abs(closed - gamma_form) / (gamma_form != 0.0 ? std::abs(gamma_form) : 1.0);
      formula_max = std::max(formula_max, rel);
      const double mean = sum[m] / static_cast<double>(n);
      const double var = std::max(0.0, sum2[m] / static_cast<double>(n) - mean * mean);
      const double se = std::sqrt(var / static_cast<double>(n));
      const double z = se > 0.0 ? std::abs(mean - closed) / se : (mean == closed ? 0.0 : INFINITY);
      sigma_max = std::max(sigma_max, z);
      t.add_row({"moment-formula:" + idx[m].str(), std::int64_t{d}, Cell{}, Cell{}, closed, gamma_form, rel});
      t.add_row({"moment-mc:" + idx[m].str(), std::int64_t{d}, Cell{}, Cell{}, mean, closed, z});
    }
  }
  t.summary["sphere_samples"] = n;
  t.check("kernel_max_rel_discrepancy", kernel_max, 0.0, cfg.threshold("kernel_tol"));
  t.check("pizzetti_max_discrepancy", pizzetti_max, 0.0, cfg.threshold("pizzetti_tol"), "j <= 3");
  t.check("moment_formula_max_rel", formula_max, 0.0, cfg.threshold("moment_tol"), "closed form vs Gamma form and trace");
  t.check("moment_mc_max_sigma", sigma_max, 0.0, cfg.threshold("moment_sigma"), "sphere Monte Carlo, |gamma| <= 6");
  return t;
}

ReportTable run_fourier_check(const ExperimentConfig& cfg) {
  auto t = start(cfg, "kernel constants and the direct against Fourier-side kernel for Gaussians",
                 {"name", "value", "paper", "gamma_identity", "rel_paper", "rel_gamma"});
  auto gamma_C = [](double alpha, int d) {
    // Reflection form of 1 / Gamma(-alpha/2).
    const double inv_gamma_neg = std::sin(-kPi * alpha / 2.0) * gsl_sf_gamma(1.0 + alpha / 2.0) / kPi;
    return std::pow(2.0, alpha) * gsl_sf_gamma(0.5 * (d + alpha)) * inv_gamma_neg / std::pow(kPi, 0.5 * d);
  };
  auto gamma_H = [](int j, int d) {
    return 2.0 * std::pow(kPi, 0.5 * d) / (std::pow(4.0, j) * gsl_sf_fact(static_cast<unsigned>(j)) *
                                            gsl_sf_gamma(0.5 * d + j));
  };
  struct Row {
    std::string name;
    double value, paper, gamma;
  };
  const std::vector<Row> constants{
      {"C(1,2)", fgff::constant_C(1.0, 2), -1.0 / (2.0 * kPi), gamma_C(1.0, 2)},
      {"C(1,3)", fgff::constant_C(1.0, 3), -1.0 / (kPi * kPi), gamma_C(1.0, 3)},
      {"H_0(d=2)", fgff::constant_H(0, 2), 2.0 * kPi, gamma_H(0, 2)},
      {"H_0(d=3)", fgff::constant_H(0, 3), 4.0 * kPi, gamma_H(0, 3)},
      {"H_1(d=2)", fgff::constant_H(1, 2), kPi / 2.0, gamma_H(1, 2)},
      {"H_1(d=3)", fgff::constant_H(1, 3), 2.0 * kPi / 3.0, gamma_H(1, 3)},
  };
  double worst = 0.0;
  for (const auto& r : constants) {
    const double rp = std::abs(r.value / r.paper - 1.0), rg = std::abs(r.value / r.gamma - 1.0);
    worst = std::max({worst, rp, rg});
    t.add_row({r.name, r.value, r.paper, r.gamma, rp, rg});
  }
  t.check("constants_max_rel", worst, 0.0, cfg.threshold("constants_tol"));

  // Plancherel fixture: unit Gaussian in d = 2 at alpha = 2, both sides equal 1/(4 pi).
  const auto g = TestFunction::gaussian({0.0, 0.0});
  const auto fc = fgff::fourier_cross_check(g, g, 2.0, cfg.quadrature.build());
  const double ref = 1.0 / (4.0 * kPi);
  const double rd = std::abs(fc.direct / ref - 1.0), rf = std::abs(fc.fourier / ref - 1.0);
  t.add_row({"plancherel direct", fc.direct, ref, Cell{}, rd, Cell{}});
  t.add_row({"plancherel fourier", fc.fourier, ref, Cell{}, rf, Cell{}});
  t.check("plancherel_direct_rel", rd, 0.0, cfg.threshold("plancherel_tol"), "alpha = 2, d = 2, unit Gaussian");
  t.check("plancherel_fourier_rel", rf, 0.0, cfg.threshold("plancherel_tol"), "alpha = 2, d = 2, unit Gaussian");

  // Informational: direct/Fourier ratio for the configured pair on the alpha grid.
  for (double alpha : cfg.alphas) {
    const auto [f, h] = pair_of(cfg, cfg.model.d);
    const auto c = fgff::fourier_cross_check(f, h, alpha, cfg.quadrature.build());
    t.add_row({"ratio direct/fourier alpha=" + format_double(alpha), c.ratio, Cell{}, Cell{}, Cell{}, Cell{}});
  }
  return t;
}

ReportTable run_mc_validate(const ExperimentConfig& cfg) {
  auto t = start(cfg, "samplers agree with exact enumeration; Ursell and tree-diagram bounds hold exactly",
                 {"box", "sites", "beta", "sampler", "observable", "exact", "estimate", "error", "z"});
  std::vector<std::vector<int>> boxes = cfg.mc.boxes;
  if (boxes.empty()) boxes = box_shapes(cfg.model.d, cfg.mc.max_sites);
  const double z_max = cfg.threshold("z_max");
  const double exact_tol = cfg.threshold("exact_tol");

  double worst_z = 0.0, worst_tree = -INFINITY, worst_u4 = -INFINITY, worst_odd = 0.0;
  std::int64_t comparisons = 0, exceedances = 0, quadruples = 0;
  double sum_z2 = 0.0;
  bool unthermalized = false;
  std::uint64_t stream = 0;
  for (const auto& ext : boxes) {
    const model::RectBox box(ext);
    const auto spec = coupling_for(cfg, box.dim());
    std::string label;
    for (std::size_t i = 0; i < ext.size(); ++i) label += (i ? "x" : "") + std::to_string(ext[i]);
    const auto orbits = pair_orbits(box);
    mc::Targets targets;
    for (std::size_t k = 0; k < orbits.size(); ++k) {
      const auto [i, j] = orbits[k].front();
      targets.pairs.push_back({std::to_string(i) + "-" + std::to_string(j), orbits[k]});
    }
    for (double beta : cfg.mc.betas) {
      const auto e = mc::exact_enumerate(spec, beta, box);
      const auto tb = mc::tree_bound_check(e);
      worst_tree = std::max(worst_tree, tb.max_violation);
      worst_u4 = std::max(worst_u4, tb.max_u4);
      quadruples += tb.quadruples;
      double odd = 0.0;
      for (std::uint32_t mask = 1; mask < (1u << e.sites); ++mask)
        if (__builtin_popcount(mask) % 2 == 1) odd = std::max(odd, std::abs(e.correlator(mask)));
      worst_odd = std::max(worst_odd, odd);
      t.add_row({label, box.size(), beta, "enumeration", "tree_bound_violation", 0.0, tb.max_violation, Cell{}, Cell{}});
      t.add_row({label, box.size(), beta, "enumeration", "max_u4", 0.0, tb.max_u4, Cell{}, Cell{}});
      t.add_row({label, box.size(), beta, "enumeration", "max_odd_correlator", 0.0, odd, Cell{}, Cell{}});

      for (auto sampler : {mc::Sampler::Metropolis, mc::Sampler::LongRangeCluster}) {
        const auto chain = chain_for(cfg, derive_seed(cfg.seed, stream++), sampler);
        const auto est = mc::estimate_observables(chain, spec, beta, box, targets);
        unthermalized = unthermalized || est.unthermalized;
        for (std::size_t k = 0; k < orbits.size(); ++k) {
          const auto [i, j] = orbits[k].front();
          const double exact = e.two_point(i, j);
          const auto& m = est.get("pair:" + targets.pairs[k].name);
          const double diff = m.mean - exact;
          const double z = m.error > 0.0 ? diff / m.error : (std::abs(diff) <= 1e-12 ? 0.0 : INFINITY);
          ++comparisons;
          sum_z2 += z * z;
          if (std::abs(z) > z_max) ++exceedances;
          worst_z = std::max(worst_z, std::abs(z));
          t.add_row({label, box.size(), beta, std::string(mc::sampler_name(sampler)), "pair:" + targets.pairs[k].name,
                     exact, m.mean, m.error, z});
        }
      }
    }
  }
  const double p_exceed = std::erfc(z_max / std::sqrt(2.0));
  t.summary["boxes"] = boxes.size();
  t.summary["comparisons"] = comparisons;
  t.summary["exceedances"] = exceedances;
  t.summary["expected_exceedances"] = p_exceed * static_cast<double>(comparisons);
  // Calibration of the error bars: about 1 when estimates and errors are consistent.
  t.summary["mean_z2"] = comparisons ? sum_z2 / static_cast<double>(comparisons) : 0.0;
  t.summary["quadruples"] = quadruples;
  t.summary["unthermalized"] = unthermalized;
  t.check("max_abs_z", worst_z, 0.0, z_max, "every two-point orbit, both samplers");
  t.check("tree_bound_max_violation", worst_tree, -INFINITY, exact_tol);
  t.check("max_u4", worst_u4, -INFINITY, exact_tol);
  t.check("max_odd_correlator", worst_odd, 0.0, exact_tol);
  return t;
}

ReportTable run_mc_twopoint(const ExperimentConfig& cfg) {
  auto t = start(cfg, "sampled two-point function decays like |x|^-(d+alpha)",
                 {"r_bin", "r_mean", "two_point", "error", "count"});
  const auto& ext = cfg.mc.box;
  const int d = static_cast<int>(ext.size());
  const auto spec = coupling_for(cfg, d);
  const auto box = centred_box(ext);
  const auto mf = mc::mean_field_beta(spec);
  const double beta = cfg.mc.beta_fraction * mf.beta_mf;
  if (d != 2) throw ConfigError("mc-twopoint: the displacement grid is two-dimensional");

  mc::Targets targets;
  const int rmax = static_cast<int>(std::ceil(cfg.mc.r_max));
  for (int x = 0; x <= rmax; ++x)
    for (int y = -rmax; y <= rmax; ++y) {
      const double r = std::hypot(x, y);
      if (r < cfg.mc.r_min || r > cfg.mc.r_max || (x == 0 && y < 0)) continue;
      targets.displacements.push_back({x, y});
    }
  const auto chain = chain_for(cfg, derive_seed(cfg.seed, 0), cfg.mc.parsed_sampler());
  const auto est = mc::estimate_observables(chain, spec, beta, box, targets);

  struct Bin {
    double sum = 0, var = 0, r = 0;
    int n = 0;
  };
  std::map<long, Bin> bins;
  for (std::size_t k = 0; k < targets.displacements.size(); ++k) {
    const auto& x = targets.displacements[k];
    const double r = std::hypot(x[0], x[1]);
    auto& b = bins[std::lround(r)];
    b.sum += est.entries[k].mean;
    b.var += est.entries[k].error * est.entries[k].error;
    b.r += r;
    ++b.n;
  }
  std::vector<double> rs, gs;
  for (const auto& [key, b] : bins) {
    const double mean = b.sum / b.n;
    // Errors within a bin are correlated; the independent-error combination is a lower bound.
    t.add_row({std::int64_t{key}, b.r / b.n, mean, std::sqrt(b.var) / b.n, std::int64_t{b.n}});
    if (mean > 0.0) {
      rs.push_back(b.r / b.n);
      gs.push_back(mean);
    }
  }
  const auto fit = numerics::loglog_fit(rs, gs);
  const double ref = -(d + cfg.model.alpha);
  t.summary["beta"] = beta;
  t.summary["beta_mf"] = mf.beta_mf;
  t.summary["slope"] = fit.slope;
  t.summary["slope_stderr"] = fit.slope_stderr;
  t.summary["reference_slope"] = ref;
  t.summary["max_rhat"] = est.max_rhat;
  t.summary["unthermalized"] = est.unthermalized;
  t.summary["nonpositive_bins"] = bins.size() - rs.size();
  const double tol = cfg.threshold("slope_tol");
  t.check("loglog_slope", fit.slope, ref - tol, ref + tol,
          "bins |x| in [" + format_double(cfg.mc.r_min) + ", " + format_double(cfg.mc.r_max) + "]");
  if (const auto rh = cfg.maybe_threshold("rhat_max")) t.check("max_rhat", est.max_rhat, 0.0, *rh);
  t.plots.push_back({"sampled two-point function", "r_mean", {"two_point"}, "",
                     {"slope " + fmt("%.3f", fit.slope) + " (ref " + fmt("%.1f", ref) + ")"}});
  return t;
}

ReportTable run_laplace_expansion(const ExperimentConfig& cfg) {
  if (cfg.mode == "deterministic") {
    // Two routes to the order-L^-alpha part of the variance: the covariance minus the lattice
    // chi-term that the renormalized pair subtracts, and the renormalized pair itself. The
    // literal int f^2 subtraction is reported too; it also carries the O(1/L) Riemann offset.
    auto t = start(cfg, "L^alpha times the variance correction matches L^alpha times the renormalized pair",
                   {"L", "covariance", "chi_term", "cov_rescaled", "pair_rescaled", "rel_diff", "int_f2_rescaled"});
    const double alpha = cfg.model.alpha;
    const int d = cfg.model.d;
    const auto model = cfg.model.build();
    const auto f = cfg.functions.at(0).build(d);
    const double norm = observables::l2_inner_product(f, f);
    const double chi = model.is_synthetic() ? model::susceptibility_exact(model).value : 1.0;
    const auto seq = observables::scaling_sequence(f, f, alpha, model, cfg.L);
    for (const auto& r : seq.rows) {
      const double c = observables::covariance(f, f, r.L, model);
      const double chi_term = std::ldexp(chi, d) / model::sigma_L(model, r.L) * lattice_square_sum(f, r.L);
      const double scale = std::pow(r.L, alpha);
      const double lhs = scale * (c - chi_term);
      const double rel = r.rescaled != 0.0 ? lhs / r.rescaled - 1.0 : (lhs == 0.0 ? 0.0 : INFINITY);
      t.add_row({std::int64_t{r.L}, c, chi_term, lhs, r.rescaled, rel, scale * (c - norm)});
    }
    t.summary["int_f2"] = norm;
    t.summary["chi"] = chi;
    if (model.is_synthetic()) {
      const auto kt = fgff::k_tilde(f, f, alpha, cfg.quadrature.build());
      t.summary["continuum_target"] = cfg.model.resolved_amplitude() / chi * kt.value;
    }
    const double rel = std::abs(std::get<double>(t.rows.back()[t.column("rel_diff")]));
    t.check("rel_diff_at_largest_L", rel, 0.0, cfg.threshold("agreement_tol"),
            "L = " + std::to_string(seq.rows.back().L));
    return t;
  }

  auto t = start(cfg, "sampled log-Laplace transform of the smeared field is quadratic in z",
                 {"z", "log_laplace", "log_error", "quadratic_fit", "gaussian", "residual", "band"});
  const auto& ext = cfg.mc.box;
  const int d = static_cast<int>(ext.size());
  const auto spec = coupling_for(cfg, d);
  const auto box = centred_box(ext);
  const auto mf = mc::mean_field_beta(spec);
  const double beta = cfg.mc.beta_fraction * mf.beta_mf;
  const int L = cfg.mc.smear_L;
  const auto sampler = cfg.mc.parsed_sampler();

  mc::Targets pilot;
  pilot.sigma_radii = {L};
  auto pilot_chain = chain_for(cfg, derive_seed(cfg.seed, 0), sampler);
  pilot_chain.measurement = std::max<std::int64_t>(1000, cfg.mc.measurement / 4);
  const auto p = mc::estimate_observables(pilot_chain, spec, beta, box, pilot);
  const double sigma = p.entries.at(0).mean;

  mc::Targets targets;
  targets.smeared.push_back({cfg.functions.at(0).build(d), L, sigma});
  targets.laplace_z = cfg.mc.z;
  const auto est = mc::estimate_observables(chain_for(cfg, derive_seed(cfg.seed, 1), sampler), spec, beta, box, targets);
  const auto fit = mc::fit_log_laplace(est.laplace);
  for (std::size_t i = 0; i < est.laplace.size(); ++i) {
    const auto& lp = est.laplace[i];
    t.add_row({lp.z, lp.log_value, lp.log_error, fit.a * lp.z + fit.b * lp.z * lp.z, std::log(lp.gaussian),
               fit.residual[i], fit.band[i]});
  }
  t.summary["beta"] = beta;
  t.summary["sigma_L"] = sigma;
  t.summary["sigma_L_error"] = p.entries.at(0).error;
  t.summary["fit_a"] = fit.a;
  t.summary["fit_b"] = fit.b;
  t.summary["variance_from_fit"] = 2.0 * fit.b;
  t.summary["max_rhat"] = est.max_rhat;
  t.summary["unthermalized"] = est.unthermalized;
  t.check("worst_residual_over_band", fit.worst, 0.0, cfg.threshold("residual_band"),
          "|residual| / (1.96 bootstrap error)");
  return t;
}

ReportTable run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case Kind::WnCovariance: return run_wn_covariance(cfg);
    case Kind::SigmaRatio: return run_sigma_ratio(cfg);
    case Kind::FgffLimit: return run_fgff_limit(cfg);
    case Kind::FgffLimitLog: return run_fgff_limit_log(cfg);
    case Kind::KernelIdentity: return run_kernel_identity(cfg);
    case Kind::FourierCheck: return run_fourier_check(cfg);
    case Kind::McValidate: return run_mc_validate(cfg);
    case Kind::McTwopoint: return run_mc_twopoint(cfg);
    case Kind::LaplaceExpansion: return run_laplace_expansion(cfg);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace lrising::experiments
