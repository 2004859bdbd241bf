#include "lrising/model/spins.hpp"

#include "lrising/errors.hpp"

namespace lrising::model {

SpinConfiguration::SpinConfiguration(RectBox b) : box(std::move(b)) {
  spins.assign(static_cast<std::size_t>(box.size()), 1);
}

void SpinConfiguration::validate() const {
  if (static_cast<std::int64_t>(spins.size()) != box.size())
    throw DomainError("SpinConfiguration: spin count does not match the box");
  for (auto s : spins)
    if (s != 1 && s != -1) throw DomainError("SpinConfiguration: spins must be +1 or -1");
}

}  // namespace lrising::model
