#pragma once

#include <vector>

#include "lrising/model/lattice.hpp"
#include "lrising/model/lattice_sums.hpp"
#include "lrising/model/two_point.hpp"
#include "lrising/testfn/test_function.hpp"

namespace lrising::observables {

// Values on the integer points of a rectangular box.
struct DenseGrid {
  model::RectBox box;
  std::vector<double> values;
};

// Integer box containing every x with f(x / L) != 0 (effective support for Gaussians).
// Polynomials have no finite support and raise CapabilityError.
model::RectBox lattice_support(const testfn::TestFunction& f, int L);

// f(x / L) sampled on the box.
DenseGrid sample(const testfn::TestFunction& f, int L, const model::RectBox& box);

// C(z) = sum_x a(x) b(x + z) over the full range of z, by real-to-complex FFT.
DenseGrid cross_correlate_fft(const DenseGrid& a, const DenseGrid& b);
// Same quantity summed directly; O(|a| |b|).
DenseGrid cross_correlate_direct(const DenseGrid& a, const DenseGrid& b);

// 1D version for one axis of separable functions, as centred weights on [-K, K].
model::AxisWeights cross_correlate_axis(const std::vector<double>& a, int a_origin, const std::vector<double>& b,
                                        int b_origin);

// sum over z in the grid of G(z) * grid(z).
double grid_sum(const model::TwoPointModel& model, const DenseGrid& grid);

}  // namespace lrising::observables
