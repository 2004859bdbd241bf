#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lrising/model/lattice.hpp"

namespace lrising::model {

// Spins on a rectangular box, stored in the box's row-major order.
struct SpinConfiguration {
  RectBox box;
  std::vector<std::int8_t> spins;

  SpinConfiguration() = default;
  // All spins +1.
  explicit SpinConfiguration(RectBox b);

  int at(std::span<const int> x) const { return spins[static_cast<std::size_t>(box.index(x))]; }
  // Throws DomainError when an entry is not +-1 or the size does not match the box.
  void validate() const;
};

}  // namespace lrising::model
