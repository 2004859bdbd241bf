#include "lrising/mc/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "lrising/errors.hpp"
#include "lrising/model/interaction.hpp"
#include "lrising/numerics/epstein.hpp"
#include "lrising/numerics/fit.hpp"
#include "lrising/observables/grid.hpp"

namespace lrising::mc {
namespace {

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct SiteWeights {
  std::vector<std::int64_t> index;
  std::vector<double> weight;
  double scale = 1.0;
};

SiteWeights smeared_weights(const observables::SmearedObservableSpec& s, const model::RectBox& box) {
  const int d = s.f.dim();
  if (d != box.dim()) throw DomainError("estimate_observables: test function dimension does not match the box");
  if (!(s.sigma > 0.0)) throw DomainError("estimate_observables: Sigma_L must be positive");
  SiteWeights w;
  const auto fb = observables::lattice_support(s.f, s.L);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::int64_t i = 0; i < fb.size(); ++i) {
    const auto p = fb.site(i);
    for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = static_cast<double>(p[static_cast<std::size_t>(k)]) / s.L;
    const double v = s.f(x);
    if (v == 0.0) continue;
    if (!box.contains(p)) throw CoverageError("estimate_observables: box does not cover the support of f(./L)");
    w.index.push_back(box.index(p));
    w.weight.push_back(v);
  }
  w.scale = std::pow(2.0, 0.5 * d) / std::sqrt(s.sigma);
  return w;
}

// Box indices of Lambda_k around the coordinate origin; throws when the box does not cover it.
std::vector<std::int64_t> cube_sites(const model::RectBox& box, int k, const char* what) {
  const auto cube = model::RectBox::centered_cube(box.dim(), k);
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(cube.size()));
  for (std::int64_t i = 0; i < cube.size(); ++i) {
    const auto p = cube.site(i);
    if (!box.contains(p)) throw CoverageError(std::string("estimate_observables: box does not contain ") + what);
    out.push_back(box.index(p));
  }
  return out;
}

// (i, j) index pairs of all translates of a displacement inside the box.
std::vector<std::pair<std::int64_t, std::int64_t>> translates(const model::RectBox& box, std::span<const int> x) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  const int d = box.dim();
  if (static_cast<int>(x.size()) != d) throw DomainError("estimate_observables: displacement dimension mismatch");
  std::vector<int> y(static_cast<std::size_t>(d));
  for (std::int64_t i = 0; i < box.size(); ++i) {
    const auto p = box.site(i);
    for (int k = 0; k < d; ++k) y[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k)] + x[static_cast<std::size_t>(k)];
    if (box.contains(y)) out.emplace_back(i, box.index(y));
  }
  if (out.empty()) throw CoverageError("estimate_observables: displacement does not fit in the box");
  return out;
}

Estimate summarize(std::string name, std::span<const double> x) {
  Estimate e;
  e.name = std::move(name);
  e.samples = static_cast<std::int64_t>(x.size());
  e.mean = mean_of(x);
  e.error = batch_means_error(x);
  e.tau_int = integrated_autocorrelation(x);
  e.rhat = split_rhat(x);
  return e;
}

}  // namespace

const Estimate& Estimates::get(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw LookupError("Estimates: no observable named '" + name + "'");
}

std::string displacement_name(std::span<const int> x) {
  std::string s = "disp:";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(x[i]);
  }
  return s;
}

double integrated_autocorrelation(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) return 0.5;
  const double m = mean_of(x);
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  c0 /= static_cast<double>(n);
  if (!(c0 > 0.0)) return 0.5;
  double tau = 0.5;
  for (std::size_t t = 1; t < n / 4; ++t) {
    double c = 0.0;
    for (std::size_t i = 0; i + t < n; ++i) c += (x[i] - m) * (x[i + t] - m);
    tau += c / (static_cast<double>(n) * c0);
    if (static_cast<double>(t) >= 6.0 * tau) break;
  }
  return std::max(tau, 0.5);
}

double batch_means_error(std::span<const double> x, int batches) {
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(batches), n / 2);
  const std::size_t len = n / b;
  std::vector<double> means(b);
  for (std::size_t k = 0; k < b; ++k) means[k] = mean_of(x.subspan(k * len, len));
  return std::sqrt(variance_of(means) / static_cast<double>(b));
}

double split_rhat(std::span<const double> x, int chunks) {
  const std::size_t m = x.size() / static_cast<std::size_t>(chunks);
  if (m < 2) return 1.0;
  std::vector<double> means(static_cast<std::size_t>(chunks));
  double w = 0.0;
  for (int c = 0; c < chunks; ++c) {
    const auto part = x.subspan(static_cast<std::size_t>(c) * m, m);
    means[static_cast<std::size_t>(c)] = mean_of(part);
    w += variance_of(part);
  }
  w /= chunks;
  if (!(w > 0.0)) return 1.0;
  const double bm = static_cast<double>(m) * variance_of(means);
  const double vplus = (static_cast<double>(m) - 1.0) / static_cast<double>(m) * w + bm / static_cast<double>(m);
  return std::sqrt(vplus / w);
}

Estimates estimate_observables(const ChainConfig& chain, const model::InteractionSpec& spec, double beta,
                               const model::RectBox& box, const Targets& targets, std::ostream* stream) {
  chain.validate();
  if (!(beta >= 0.0)) throw DomainError("estimate_observables: beta must be >= 0");

  std::vector<std::string> names;
  for (const auto& g : targets.pairs) {
    if (g.pairs.empty()) throw DomainError("estimate_observables: empty pair group " + g.name);
    for (auto [i, j] : g.pairs)
      if (i < 0 || j < 0 || i >= box.size() || j >= box.size())
        throw DomainError("estimate_observables: pair index outside the box");
    names.push_back("pair:" + g.name);
  }
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> disp_fwd;
  for (const auto& x : targets.displacements) {
    disp_fwd.push_back(translates(box, x));
    names.push_back(displacement_name(x));
  }
  std::vector<std::vector<std::int64_t>> chi_sites, sigma_sites;
  for (int k : targets.chi_radii) {
    chi_sites.push_back(cube_sites(box, k, "Lambda_k"));
    names.push_back("chi:" + std::to_string(k));
  }
  for (int L : targets.sigma_radii) {
    sigma_sites.push_back(cube_sites(box, L, "Lambda_L"));
    names.push_back("sigma:" + std::to_string(L));
  }
  const std::int64_t origin = targets.chi_radii.empty() ? -1 : [&] {
    const model::Point o(static_cast<std::size_t>(box.dim()), 0);
    return box.index(o);
  }();
  if (targets.magnetization) {
    names.push_back("m2");
    names.push_back("m4");
  }
  std::vector<SiteWeights> smeared;
  for (std::size_t k = 0; k < targets.smeared.size(); ++k) {
    smeared.push_back(smeared_weights(targets.smeared[k], box));
    names.push_back("T:" + std::to_string(k));
  }

  ChainState st = make_chain(spec, box, beta);
  numerics::CounterRng rng(chain.seed);
  if (chain.sampler == Sampler::LongRangeCluster) {
    thermalize_cluster(st, chain.thermalization, rng);
  } else {
    for (std::int64_t s = 0; s < chain.thermalization; ++s) sweep(st, chain.sampler, rng);
  }

  std::vector<std::vector<double>> series(names.size());
  if (stream) *stream << "sweep,observable,value\n";
  std::vector<double> th;
  const double nsites = static_cast<double>(box.size());
  std::vector<double> row(names.size());

  for (std::int64_t s = 1; s <= chain.measurement; ++s) {
    sweep(st, chain.sampler, rng);
    if (s % chain.stride != 0) continue;
    const auto& sp = st.config.spins;
    auto spin = [&](std::int64_t i) { return static_cast<double>(sp[static_cast<std::size_t>(i)]); };
    std::size_t c = 0;
    for (const auto& g : targets.pairs) {
      double acc = 0.0;
      for (auto [i, j] : g.pairs) acc += spin(i) * spin(j);
      row[c++] = acc / static_cast<double>(g.pairs.size());
    }
    if (!disp_fwd.empty()) {
      const auto h = st.local_fields();
      th.resize(h.size());
      for (std::size_t i = 0; i < h.size(); ++i) th[i] = std::tanh(beta * h[i]);
      for (const auto& tr : disp_fwd) {
        double acc = 0.0;
        for (auto [i, j] : tr)
          acc += spin(i) * th[static_cast<std::size_t>(j)] + th[static_cast<std::size_t>(i)] * spin(j);
        row[c++] = acc / (2.0 * static_cast<double>(tr.size()));
      }
    }
    for (const auto& sites : chi_sites) {
      double acc = 0.0;
      for (auto i : sites) acc += spin(i);
      row[c++] = spin(origin) * acc;
    }
    for (const auto& sites : sigma_sites) {
      double acc = 0.0;
      for (auto i : sites) acc += spin(i);
      row[c++] = acc * acc;
    }
    if (targets.magnetization) {
      double m = 0.0;
      for (auto v : sp) m += v;
      row[c++] = m * m / nsites;
      row[c++] = m * m * m * m / (nsites * nsites);
    }
    for (const auto& w : smeared) {
      double acc = 0.0;
      for (std::size_t q = 0; q < w.index.size(); ++q) acc += w.weight[q] * spin(w.index[q]);
      row[c++] = w.scale * acc;
    }
    for (std::size_t k = 0; k < names.size(); ++k) {
      series[k].push_back(row[k]);
      if (stream) *stream << s << ',' << names[k] << ',' << fmt(row[k]) << '\n';
    }
  }

  Estimates out;
  out.seed = chain.seed;
  out.sampler = std::string(sampler_name(chain.sampler));
  out.beta = beta;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (series[k].empty()) throw DomainError("estimate_observables: stride leaves no measurements");
    out.entries.push_back(summarize(names[k], series[k]));
    out.max_rhat = std::max(out.max_rhat, out.entries.back().rhat);
  }
  out.unthermalized = out.max_rhat > targets.rhat_threshold;

  const std::size_t first_t = names.size() - smeared.size();
  for (std::size_t t = 0; t < smeared.size(); ++t) {
    const auto& x = series[first_t + t];
    out.smeared_samples.push_back(x);
    if (targets.laplace_z.empty()) continue;
    const std::size_t n = x.size();
    const double var = variance_of(x);
    const auto block = static_cast<std::size_t>(
        std::clamp(std::ceil(2.0 * out.entries[first_t + t].tau_int), 1.0, static_cast<double>(n)));
    const std::size_t nblocks = (n + block - 1) / block;
    // Replicate starts are drawn from a stream derived from the chain seed, so the bands are
    // reproducible too.
    numerics::CounterRng brng = numerics::CounterRng(chain.seed).split(1000 + t);
    const int reps = std::max(targets.bootstrap_replicates, 2);
    std::vector<std::vector<std::size_t>> starts(static_cast<std::size_t>(reps));
    for (auto& st_r : starts) {
      st_r.resize(nblocks);
      for (auto& v : st_r) v = static_cast<std::size_t>(brng.below(n - block + 1));
    }
    for (double z : targets.laplace_z) {
      std::vector<double> e(n);
      for (std::size_t i = 0; i < n; ++i) e[i] = std::exp(z * x[i]);
      LaplacePoint p;
      p.target = static_cast<int>(t);
      p.z = z;
      p.value = mean_of(e);
      p.log_value = std::log(p.value);
      p.gaussian = std::exp(0.5 * z * z * var);
      std::vector<double> rv(static_cast<std::size_t>(reps)), lrv(static_cast<std::size_t>(reps));
      for (int r = 0; r < reps; ++r) {
        double acc = 0.0;
        std::size_t cnt = 0;
        for (auto b0 : starts[static_cast<std::size_t>(r)])
          for (std::size_t i = b0; i < b0 + block && cnt < n; ++i, ++cnt) acc += e[i];
        rv[static_cast<std::size_t>(r)] = acc / static_cast<double>(cnt);
        lrv[static_cast<std::size_t>(r)] = std::log(rv[static_cast<std::size_t>(r)]);
      }
      p.error = std::sqrt(variance_of(rv));
      p.log_error = std::sqrt(variance_of(lrv));
      out.laplace.push_back(p);
    }
  }
  return out;
}

void write_estimates_json(std::ostream& os, const Estimates& e) {
  nlohmann::ordered_json j;
  j["schema"] = "lrising.mc.estimates/1";
  j["seed"] = e.seed;
  j["sampler"] = e.sampler;
  j["beta"] = e.beta;
  j["max_rhat"] = e.max_rhat;
  j["unthermalized"] = e.unthermalized;
  auto& arr = j["estimates"] = nlohmann::ordered_json::array();
  for (const auto& x : e.entries)
    arr.push_back({{"name", x.name},
                   {"mean", x.mean},
                   {"error", x.error},
                   {"tau_int", x.tau_int},
                   {"rhat", x.rhat},
                   {"samples", x.samples}});
  auto& lap = j["laplace"] = nlohmann::ordered_json::array();
  for (const auto& p : e.laplace)
    lap.push_back({{"target", p.target},
                   {"z", p.z},
                   {"value", p.value},
                   {"error", p.error},
                   {"log_value", p.log_value},
                   {"log_error", p.log_error},
                   {"gaussian", p.gaussian}});
  os << j.dump(2) << '\n';
}

QuadraticLaplaceFit fit_log_laplace(std::span<const LaplacePoint> points) {
  QuadraticLaplaceFit f;
  // Normal equations for y = a z + b z^2 (no constant: log <e^0> = 0 exactly).
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (const auto& p : points) {
    if (p.z == 0.0) continue;
    const double w = p.log_error > 0.0 ? 1.0 / (p.log_error * p.log_error) : 1.0;
    const double z = p.z, z2 = z * z;
    s11 += w * z2;
    s12 += w * z * z2;
    s22 += w * z2 * z2;
    r1 += w * z * p.log_value;
    r2 += w * z2 * p.log_value;
  }
  const double det = s11 * s22 - s12 * s12;
  if (!(std::abs(det) > 0.0)) throw DomainError("fit_log_laplace: need two distinct non-zero z");
  f.a = (r1 * s22 - r2 * s12) / det;
  f.b = (s11 * r2 - s12 * r1) / det;
  for (const auto& p : points) {
    const double res = p.log_value - (f.a * p.z + f.b * p.z * p.z);
    f.z.push_back(p.z);
    f.residual.push_back(res);
    f.band.push_back(1.96 * p.log_error);
    if (p.z != 0.0) f.worst = std::max(f.worst, std::abs(res) / (1.96 * p.log_error));
  }
  return f;
}

MeanFieldBeta mean_field_beta(const model::InteractionSpec& spec, std::int64_t radius) {
  spec.validate();
  const double p = spec.d + spec.alpha;
  MeanFieldBeta m;
  m.radius = radius;
  m.beta_mf = model::beta_mean_field(spec);
  const double partial = spec.amplitude * numerics::box_power_sum(spec.d, p, radius);
  m.truncated = 1.0 / partial;
  m.lower = 1.0 / (partial + spec.amplitude * numerics::power_tail_bound(spec.d, p, radius));
  return m;
}

std::vector<BetaDiagnosticRow> beta_diagnostic(const model::InteractionSpec& spec, const model::RectBox& box,
                                               std::span<const double> betas, const ChainConfig& chain) {
  const double bmf = model::beta_mean_field(spec);
  Targets t;
  t.magnetization = true;
  std::vector<BetaDiagnosticRow> rows;
  for (double b : betas) {
    BetaDiagnosticRow r;
    r.beta = b;
    r.beta_mf = bmf;
    r.untrusted = b >= 0.8 * bmf;
    ChainConfig c = chain;
    c.seed = numerics::CounterRng(chain.seed).split(rows.size()).key();
    const auto est = estimate_observables(c, spec, b, box, t);
    r.chi_box = est.get("m2").mean;
    r.chi_error = est.get("m2").error;
    const double n = static_cast<double>(box.size());
    const double mean4 = est.get("m4").mean * n * n, mean2 = r.chi_box * n;
    r.binder = mean2 > 0.0 ? mean4 / (mean2 * mean2) : std::numeric_limits<double>::quiet_NaN();
    // First-order propagation of the two batch-means errors (treated as independent, so this
    // overstates the error slightly).
    const double e4 = est.get("m4").error * n * n, e2 = r.chi_error * n;
    r.binder_error = r.binder * std::sqrt(std::pow(e4 / mean4, 2) + 4.0 * std::pow(e2 / mean2, 2));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace lrising::mc
