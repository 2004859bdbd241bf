#include "lrising/model/interaction.hpp"

#include <cmath>
#include <string>

#include "lrising/errors.hpp"
#include "lrising/numerics/epstein.hpp"

namespace lrising::model {

void InteractionSpec::validate() const {
  if (d < 2) throw DomainError("InteractionSpec: d must be >= 2");
  if (!(alpha > 0.0)) throw DomainError("InteractionSpec: alpha must be positive");
  if (!(amplitude > 0.0)) throw DomainError("InteractionSpec: amplitude must be positive");
}

void ThermoParams::validate() const {
  if (!(beta >= 0.0)) throw DomainError("ThermoParams: beta must be nonnegative");
}

double interaction_j(const InteractionSpec& spec, std::span<const int> x, std::span<const int> y) {
  if (x.size() != y.size() || static_cast<int>(x.size()) != spec.d)
    throw DomainError("interaction_j: dimension mismatch");
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dz = static_cast<double>(x[i]) - static_cast<double>(y[i]);
    r2 += dz * dz;
  }
  if (r2 == 0.0) throw DomainError("interaction_j: self-coupling x = y is undefined");
  return interaction_j_r2(spec, r2);
}

double interaction_j_r2(const InteractionSpec& spec, double r2) {
  return spec.amplitude * std::pow(r2, -0.5 * (spec.d + spec.alpha));
}

double coupling_total(const InteractionSpec& spec) {
  spec.validate();
  return spec.amplitude * numerics::epstein_zeta(spec.d, spec.d + spec.alpha);
}

double beta_mean_field(const InteractionSpec& spec) { return 1.0 / coupling_total(spec); }

}  // namespace lrising::model
