#pragma once

#include <span>
#include <vector>

#include "lrising/model/two_point.hpp"

namespace lrising::model {

// Weights on one axis: w[k + K] for k in [-K, K]; the vector has odd length 2K + 1.
using AxisWeights = std::vector<double>;

// Sum over z of G(z) * prod_i w_i(z_i). Axes whose weights are exactly symmetric are
// folded onto z_i >= 0. Synthetic models in d = 3 go through a lookup table in |z|^2.
// Outer slabs are reduced in a fixed order, so the result is thread-count independent.
double weighted_lattice_sum(const TwoPointModel& model, std::span<const AxisWeights> weights);

// Overlap counts N_L(k) = max(0, 2L + 1 - |k|) for k in [-2L, 2L].
AxisWeights overlap_weights(int L);

}  // namespace lrising::model
