#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "lrising/model/interaction.hpp"
#include "lrising/model/lattice.hpp"
#include "lrising/model/spins.hpp"
#include "lrising/numerics/rng.hpp"

namespace lrising::mc {

using model::SpinConfiguration;

// -sum over unordered pairs {x, y} in the box of J(x, y) sigma_x sigma_y.
double energy(const model::InteractionSpec& spec, const SpinConfiguration& s);

// J over all displacements that fit in a box, indexed by prod_i (delta_i + n_i - 1) with
// the last axis fastest. J(0) = 0.
class CouplingTable {
 public:
  CouplingTable(const model::InteractionSpec& spec, const model::RectBox& box);

  const model::RectBox& box() const { return box_; }
  double between(std::int64_t i, std::int64_t j) const;
  std::span<const double> values() const { return values_; }

  // Calls fn(first_site, J_row, count) for every row of the box; J_row[t] is the coupling
  // between site `k` and site first_site + t.
  template <class Fn>
  void for_each_row(std::int64_t k, Fn&& fn) const;

  // h_i = sum_j J(i, j) sigma_j for every site.
  void local_fields(std::span<const std::int8_t> spins, std::span<double> out) const;

 private:
  model::RectBox box_;
  std::vector<int> ext_;
  std::vector<std::int64_t> disp_stride_;
  std::vector<int> coords_;  // site coordinates relative to the box origin, d per site
  std::vector<double> values_;
};

enum class Sampler { Metropolis, LongRangeCluster };

std::string_view sampler_name(Sampler s);
Sampler parse_sampler(std::string_view name);

struct ChainConfig {
  std::uint64_t seed = 1;
  std::int64_t thermalization = 1000;
  std::int64_t measurement = 10000;
  Sampler sampler = Sampler::Metropolis;
  std::int64_t stride = 1;

  void validate() const;
};

// Displacements sorted by decreasing coupling with the cumulative bond hazard
// 2 beta sum_{l <= m} J_l, so the next activated bond from a site is one binary search away.
struct ClusterTable {
  std::vector<std::int64_t> order;  // displacement index in CouplingTable layout
  std::vector<double> hazard;       // cumulative
};

// Everything a single chain owns.
struct ChainState {
  model::InteractionSpec spec;
  double beta = 0.0;
  SpinConfiguration config;
  std::shared_ptr<const CouplingTable> couplings;
  std::shared_ptr<const ClusterTable> cluster;
  std::vector<double> field;
  bool field_valid = false;
  std::int64_t last_cluster_size = 0;
  // Cluster updates that make up one sweep; fixed while measuring.
  std::int64_t cluster_updates_per_sweep = 1;

  // Refreshes the cached local fields if a cluster move invalidated them.
  std::span<const double> local_fields();
};

// Starts from the all-plus configuration.
ChainState make_chain(const model::InteractionSpec& spec, const model::RectBox& box, double beta);

// One sequential pass over the sites, proposing a uniformly drawn spin at each; returns the
// number of flips.
std::int64_t metropolis_sweep(ChainState& state, numerics::CounterRng& rng);

// One Wolff-type cluster flip grown with the cumulative tables; returns the cluster size.
std::int64_t cluster_update(ChainState& state, numerics::CounterRng& rng);

// A Metropolis sweep, or state.cluster_updates_per_sweep cluster updates.
void sweep(ChainState& state, Sampler sampler, numerics::CounterRng& rng);

// Burn-in for the cluster sampler: `sweeps` rounds of updates, each round stopping once a box
// volume of spins has flipped. The stopping rule depends on the state and is not stationary, so
// it is only used here; afterwards cluster_updates_per_sweep is fixed to the round average.
void thermalize_cluster(ChainState& state, std::int64_t sweeps, numerics::CounterRng& rng);

template <class Fn>
void CouplingTable::for_each_row(std::int64_t k, Fn&& fn) const {
  const int d = static_cast<int>(ext_.size());
  const int* ck = &coords_[static_cast<std::size_t>(k) * static_cast<std::size_t>(d)];
  const int last = ext_[static_cast<std::size_t>(d - 1)];
  const std::int64_t rows = box_.size() / last;
  std::vector<int> r(static_cast<std::size_t>(d), 0);
  for (std::int64_t row = 0; row < rows; ++row) {
    std::int64_t base = 0;
    for (int i = 0; i < d - 1; ++i)
      base += (r[static_cast<std::size_t>(i)] - ck[i] + ext_[static_cast<std::size_t>(i)] - 1) *
              disp_stride_[static_cast<std::size_t>(i)];
    base += -ck[d - 1] + last - 1;
    fn(row * last, values_.data() + base, last);
    for (int i = d - 2; i >= 0; --i) {
      if (++r[static_cast<std::size_t>(i)] < ext_[static_cast<std::size_t>(i)]) break;
      r[static_cast<std::size_t>(i)] = 0;
    }
  }
}

}  // namespace lrising::mc
