#pragma once

#include <cstdint>
#include <vector>

#include "lrising/model/interaction.hpp"
#include "lrising/model/lattice.hpp"

namespace lrising::mc {

inline constexpr int kMaxEnumerationSites = 22;

// Exact Gibbs expectations on a small box. Every correlator of a product of spins is kept:
// correlator(mask) = <prod_{i in mask} sigma_i> with bit i standing for site i of the box.
struct EnumerationResult {
  model::RectBox box;
  double beta = 0.0;
  double log_z = 0.0;  // log Z(Lambda, beta, 0)
  int sites = 0;

  double correlator(std::uint32_t mask) const;
  double two_point(std::int64_t x, std::int64_t y) const;
  // <s_x s_y s_z s_t>; repeated sites cancel in pairs.
  double four_point(std::int64_t x, std::int64_t y, std::int64_t z, std::int64_t t) const;
  // n x n matrix of <sigma_x sigma_y>, row-major.
  std::vector<double> two_point_table() const;

  // Normalised Walsh transform of the Boltzmann weights over even masks only; odd masks are
  // zero by the global flip symmetry and are not stored.
  std::vector<double> even;
};

// Throws CapacityError above kMaxEnumerationSites sites.
EnumerationResult exact_enumerate(const model::InteractionSpec& spec, double beta, const model::RectBox& box);

double ursell_u4(const EnumerationResult& e, std::int64_t x, std::int64_t y, std::int64_t z, std::int64_t t);

struct TreeBoundReport {
  double max_violation = 0.0;  // max of |U4| - 2 sum_w prod G(w, x_i); <= 0 means the bound holds
  double max_u4 = 0.0;         // largest U4 seen (<= 0 expected)
  std::int64_t quadruples = 0;
};

// Scans all unordered quadruples with repetition.
TreeBoundReport tree_bound_check(const EnumerationResult& e);

}  // namespace lrising::mc
