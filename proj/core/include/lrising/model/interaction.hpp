#pragma once

#include <span>

namespace lrising::model {

struct InteractionSpec {
  int d = 2;
  double alpha = 1.0;
  double amplitude = 1.0;

  void validate() const;
};

struct ThermoParams {
  double beta = 0.0;  // external field is identically zero

  void validate() const;
};

// C / |x - y|^{d + alpha}, Euclidean norm.
double interaction_j(const InteractionSpec& spec, std::span<const int> x, std::span<const int> y);

// Same coupling evaluated from a squared displacement length.
double interaction_j_r2(const InteractionSpec& spec, double r2);

// Sum over x != 0 of J(0, x) = C * Z_d(d + alpha), and the mean-field scale 1 / that.
double coupling_total(const InteractionSpec& spec);
double beta_mean_field(const InteractionSpec& spec);

}  // namespace lrising::model
