#pragma once

// Small hand-rolled generators for property tests; all draws go through the library RNG
// so failures reproduce from the printed seed.

#include <cstdint>
#include <vector>

#include "lrising/numerics/rng.hpp"

namespace gen {

inline int int_in(lrising::numerics::CounterRng& r, int lo, int hi) {
  return lo + static_cast<int>(r.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

inline double real_in(lrising::numerics::CounterRng& r, double lo, double hi) { return lo + (hi - lo) * r.uniform(); }

inline std::vector<int> lattice_point(lrising::numerics::CounterRng& r, int d, int radius) {
  std::vector<int> z(static_cast<std::size_t>(d));
  for (auto& v : z) v = int_in(r, -radius, radius);
  return z;
}

inline std::vector<double> point(lrising::numerics::CounterRng& r, int d, double radius) {
  std::vector<double> x(static_cast<std::size_t>(d));
  for (auto& v : x) v = real_in(r, -radius, radius);
  return x;
}

}  // namespace gen
