#include "lrising/mc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lrising/errors.hpp"
#include "lrising/numerics/summation.hpp"

namespace lrising::mc {

double energy(const model::InteractionSpec& spec, const SpinConfiguration& s) {
  spec.validate();
  s.validate();
  if (s.box.dim() != spec.d) throw DomainError("energy: dimension mismatch");
  const std::int64_t n = s.box.size();
  const int d = spec.d;
  std::vector<model::Point> sites(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) sites[static_cast<std::size_t>(i)] = s.box.site(i);
  numerics::CompensatedSum acc;
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      for (int k = 0; k < d; ++k) {
        const double t = sites[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] -
                         sites[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
        r2 += t * t;
      }
      acc.add(-model::interaction_j_r2(spec, r2) * s.spins[static_cast<std::size_t>(i)] *
              s.spins[static_cast<std::size_t>(j)]);
    }
  return acc.value();
}

CouplingTable::CouplingTable(const model::InteractionSpec& spec, const model::RectBox& box) : box_(box), ext_(box.extents) {
  spec.validate();
  const int d = box.dim();
  if (d != spec.d) throw DomainError("CouplingTable: dimension mismatch");
  disp_stride_.assign(static_cast<std::size_t>(d), 1);
  for (int i = d - 2; i >= 0; --i)
    disp_stride_[static_cast<std::size_t>(i)] =
        disp_stride_[static_cast<std::size_t>(i + 1)] * (2 * ext_[static_cast<std::size_t>(i + 1)] - 1);
  const std::int64_t total = disp_stride_[0] * (2 * ext_[0] - 1);
  values_.assign(static_cast<std::size_t>(total), 0.0);
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t r = idx;
    double r2 = 0.0;
    for (int i = d - 1; i >= 0; --i) {
      const int side = 2 * ext_[static_cast<std::size_t>(i)] - 1;
      const int v = static_cast<int>(r % side) - (ext_[static_cast<std::size_t>(i)] - 1);
      r /= side;
      r2 += static_cast<double>(v) * v;
    }
    if (r2 > 0.0) values_[static_cast<std::size_t>(idx)] = model::interaction_j_r2(spec, r2);
  }
  const std::int64_t n = box.size();
  coords_.resize(static_cast<std::size_t>(n * d));
  for (std::int64_t s = 0; s < n; ++s) {
    std::int64_t r = s;
    for (int i = d - 1; i >= 0; --i) {
      coords_[static_cast<std::size_t>(s * d + i)] = static_cast<int>(r % ext_[static_cast<std::size_t>(i)]);
      r /= ext_[static_cast<std::size_t>(i)];
    }
  }
}

double CouplingTable::between(std::int64_t i, std::int64_t j) const {
  const int d = static_cast<int>(ext_.size());
  std::int64_t idx = 0;
  for (int k = 0; k < d; ++k)
    idx += (coords_[static_cast<std::size_t>(j * d + k)] - coords_[static_cast<std::size_t>(i * d + k)] +
            ext_[static_cast<std::size_t>(k)] - 1) *
           disp_stride_[static_cast<std::size_t>(k)];
  return values_[static_cast<std::size_t>(idx)];
}

void CouplingTable::local_fields(std::span<const std::int8_t> spins, std::span<double> out) const {
  const std::int64_t n = box_.size();
  for (std::int64_t k = 0; k < n; ++k) {
    double h = 0.0;
    for_each_row(k, [&](std::int64_t first, const double* J, int count) {
      const std::int8_t* s = spins.data() + first;
      for (int t = 0; t < count; ++t) h += J[t] * s[t];
    });
    out[static_cast<std::size_t>(k)] = h;
  }
}

std::string_view sampler_name(Sampler s) { return s == Sampler::Metropolis ? "metropolis" : "cluster"; }

Sampler parse_sampler(std::string_view name) {
  if (name == "metropolis") return Sampler::Metropolis;
  if (name == "cluster") return Sampler::LongRangeCluster;
  throw ConfigError("unknown sampler '" + std::string(name) + "' (expected metropolis or cluster)");
}

void ChainConfig::validate() const {
  if (thermalization < 0) throw ConfigError("ChainConfig: thermalization sweeps must be >= 0");
  if (measurement <= 0) throw ConfigError("ChainConfig: measurement sweeps must be > 0");
  if (stride <= 0) throw ConfigError("ChainConfig: stride must be > 0");
}

std::span<const double> ChainState::local_fields() {
  if (!field_valid) {
    field.resize(static_cast<std::size_t>(config.box.size()));
    couplings->local_fields(config.spins, field);
    field_valid = true;
  }
  return field;
}

ChainState make_chain(const model::InteractionSpec& spec, const model::RectBox& box, double beta) {
  if (!(beta >= 0.0)) throw DomainError("make_chain: beta must be >= 0");
  ChainState st;
  st.spec = spec;
  st.beta = beta;
  st.config = SpinConfiguration(box);
  auto table = std::make_shared<CouplingTable>(spec, box);

  auto cl = std::make_shared<ClusterTable>();
  const auto J = table->values();
  cl->order.resize(J.size());
  std::iota(cl->order.begin(), cl->order.end(), std::int64_t{0});
  std::erase_if(cl->order, [&](std::int64_t i) { return J[static_cast<std::size_t>(i)] == 0.0; });
  std::stable_sort(cl->order.begin(), cl->order.end(),
                   [&](std::int64_t a, std::int64_t b) { return J[static_cast<std::size_t>(a)] > J[static_cast<std::size_t>(b)]; });
  cl->hazard.resize(cl->order.size());
  double acc = 0.0;
  for (std::size_t m = 0; m < cl->order.size(); ++m) {
    acc += 2.0 * beta * J[static_cast<std::size_t>(cl->order[m])];
    cl->hazard[m] = acc;
  }
  st.couplings = std::move(table);
  st.cluster = std::move(cl);
  return st;
}

std::int64_t metropolis_sweep(ChainState& st, numerics::CounterRng& rng) {
  st.local_fields();
  auto& s = st.config.spins;
  auto& h = st.field;
  const std::int64_t n = st.config.box.size();
  std::int64_t accepted = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    const double dE = 2.0 * s[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(k)];
    // The proposed spin is uniform on {+1, -1}, so half the proposals keep the spin; this makes a
    // sweep at beta = 0 an exact independent resampling. The low half of the same uniform then
    // serves as the acceptance draw.
    const double u = rng.uniform();
    if (u >= 0.5) continue;
    if (dE > 0.0 && 2.0 * u >= std::exp(-st.beta * dE)) continue;
    s[static_cast<std::size_t>(k)] = static_cast<std::int8_t>(-s[static_cast<std::size_t>(k)]);
    const double delta = 2.0 * s[static_cast<std::size_t>(k)];
    st.couplings->for_each_row(k, [&](std::int64_t first, const double* J, int count) {
      double* hr = h.data() + first;
      for (int t = 0; t < count; ++t) hr[t] += delta * J[t];
    });
    ++accepted;
  }
  return accepted;
}

std::int64_t cluster_update(ChainState& st, numerics::CounterRng& rng) {
  auto& s = st.config.spins;
  const auto& box = st.config.box;
  const int d = box.dim();
  const std::int64_t n = box.size();
  const auto& order = st.cluster->order;
  const auto& hazard = st.cluster->hazard;
  const double total = hazard.empty() ? 0.0 : hazard.back();

  // Displacement strides, to turn a table index back into a coordinate offset.
  std::vector<int> side(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) side[static_cast<std::size_t>(i)] = 2 * box.extents[static_cast<std::size_t>(i)] - 1;

  const auto seed = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)));
  const std::int8_t sign = s[static_cast<std::size_t>(seed)];
  std::vector<std::int64_t> stack{seed};
  s[static_cast<std::size_t>(seed)] = static_cast<std::int8_t>(-sign);
  std::int64_t size = 1;
  std::vector<int> xi(static_cast<std::size_t>(d));

  while (!stack.empty()) {
    const std::int64_t i = stack.back();
    stack.pop_back();
    std::int64_t r = i;
    for (int k = d - 1; k >= 0; --k) {
      xi[static_cast<std::size_t>(k)] = static_cast<int>(r % box.extents[static_cast<std::size_t>(k)]);
      r /= box.extents[static_cast<std::size_t>(k)];
    }
    double pos = 0.0;
    for (;;) {
      // Bonds along the sorted list are independent with hazards 2 beta J_m, so the gap to the
      // next activated one is an Exp(1) step in cumulative hazard.
      pos += -std::log1p(-rng.uniform());
      if (pos >= total) break;
      const auto m = static_cast<std::size_t>(std::upper_bound(hazard.begin(), hazard.end(), pos) - hazard.begin());
      pos = hazard[m];
      std::int64_t idx = order[m];
      std::int64_t j = 0, stride = 1;
      bool inside = true;
      for (int k = d - 1; k >= 0 && inside; --k) {
        const int e = box.extents[static_cast<std::size_t>(k)];
        const int y = xi[static_cast<std::size_t>(k)] + static_cast<int>(idx % side[static_cast<std::size_t>(k)]) - (e - 1);
        idx /= side[static_cast<std::size_t>(k)];
        inside = y >= 0 && y < e;
        j += y * stride;
        stride *= e;
      }
      if (!inside) continue;
      if (s[static_cast<std::size_t>(j)] != sign) continue;  // already flipped, or anti-aligned
      s[static_cast<std::size_t>(j)] = static_cast<std::int8_t>(-sign);
      stack.push_back(j);
      ++size;
    }
  }
  st.field_valid = false;
  st.last_cluster_size = size;
  return size;
}

void sweep(ChainState& st, Sampler sampler, numerics::CounterRng& rng) {
  if (sampler == Sampler::Metropolis) {
    metropolis_sweep(st, rng);
    return;
  }
  for (std::int64_t k = 0; k < st.cluster_updates_per_sweep; ++k) cluster_update(st, rng);
}

void thermalize_cluster(ChainState& st, std::int64_t sweeps, numerics::CounterRng& rng) {
  const std::int64_t n = st.config.box.size();
  std::int64_t updates = 0;
  for (std::int64_t s = 0; s < sweeps; ++s) {
    std::int64_t flipped = 0;
    while (flipped < n) {
      flipped += cluster_update(st, rng);
      ++updates;
    }
  }
  if (sweeps > 0) st.cluster_updates_per_sweep = std::max<std::int64_t>(1, (updates + sweeps / 2) / sweeps);
}

}  // namespace lrising::mc
