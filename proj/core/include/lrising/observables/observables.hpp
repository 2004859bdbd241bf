#pragma once

#include <optional>
#include <vector>

#include "lrising/model/spins.hpp"
#include "lrising/model/two_point.hpp"
#include "lrising/numerics/fit.hpp"
#include "lrising/testfn/multi_index.hpp"
#include "lrising/testfn/test_function.hpp"

namespace lrising::observables {

using testfn::MultiIndex;
using testfn::TestFunction;

struct SmearedObservableSpec {
  TestFunction f;
  int L = 1;
  double sigma = 1.0;  // Sigma_L of the model the spins come from
};

// (2^{d/2} / sqrt(Sigma_L)) * sum_x f(x / L) sigma_x. Throws CoverageError when a site
// with f(x / L) != 0 lies outside the configuration box.
double smeared_value(const SmearedObservableSpec& spec, const model::SpinConfiguration& spins);

// How sums of the form sum_z G(z) C_fg(z) are evaluated.
//   Separable: per-axis correlations and a weighted lattice sum (both f, g separable)
//   Fourier:   FFT cross-correlation of the sampled functions, then a dense grid sum
//   Direct:    plain double sum over x and y
enum class Path { Auto, Separable, Fourier, Direct };

// (2^d / Sigma_L) sum_{x,y} f(x/L) g(y/L) G(x - y).
double covariance(const TestFunction& f, const TestFunction& g, int L, const model::TwoPointModel& model,
                  Path path = Path::Auto);

// int f g over R^d by tensor Gauss-Legendre on the common support box.
double l2_inner_product(const TestFunction& f, const TestFunction& g, int panels = 16);

struct KernelMoment {
  double partial = 0.0;        // sum over |y|_inf <= R_cut of G(y) y^gamma
  double tail_estimate = 0.0;  // integral approximation of the rest
  double tail_bound = 0.0;     // rigorous bound on the absolute rest (inf if unknown)
  int r_cut = 0;
  double value() const { return partial + tail_estimate; }
};

// Origin included only for gamma = 0, where y^0 = 1; then partial = chi_{R_cut}.
// Odd gamma returns exact zeros. Throws DivergenceError if |gamma| >= p - d.
KernelMoment kernel_moment(const model::TwoPointModel& model, const MultiIndex& gamma, int r_cut);

struct MomentValue {
  double value = 0.0;
  double error = 0.0;
};

// Full-lattice moment: Epstein-zeta exact for synthetic models when gamma is 0 or 2 e_i,
// exact for zero-tail tables, otherwise kernel_moment(...).value() with its tail bound.
MomentValue full_kernel_moment(const model::TwoPointModel& model, const MultiIndex& gamma, int r_cut);

struct RenormalizedPairSpec {
  TestFunction f;
  TestFunction g;
  double alpha = 1.0;
  int L = 1;
  int r_cut = 0;  // 0 picks max(64, L * (r_f + r_g))
};

struct PairResult {
  double value = 0.0;
  double tail_bound = 0.0;
  double compact = 0.0;  // sum_z G(z) C_fg(z), unnormalized
  double moment = 0.0;   // Taylor side, unnormalized
  double sigma = 0.0;    // Sigma_L
  int taylor_order = 0;
  int r_cut = 0;
};

// <R_{alpha,L}[T_f T_g]> with sigma_x sigma_y replaced by G(x - y). When g has no finite
// support the y-sum is restricted to |y - x|_inf <= r_cut and the moments are truncated
// at the same radius; the tail estimate of the moments is then subtracted separately.
PairResult renormalized_pair_expectation(const RenormalizedPairSpec& spec, const model::TwoPointModel& model,
                                         Path path = Path::Auto);

struct ScalingRow {
  int L = 0;
  double raw = 0.0;
  double rescaled = 0.0;
  double tail_bound = 0.0;  // on the rescaled value
  double wallclock_ms = 0.0;
};

struct ScalingTable {
  std::vector<ScalingRow> rows;
  bool log_branch = false;  // alpha even: rescaling by L^alpha / log L
  numerics::Extrapolation extrapolation;
  bool extrapolated = false;
};

// L^alpha <R> (or L^alpha / log L <R> for even alpha) for each L, with an extrapolated limit:
// limit + b L^-kappa over all rows, or limit + b / log L over the three largest L.
ScalingTable scaling_sequence(const TestFunction& f, const TestFunction& g, double alpha,
                              const model::TwoPointModel& model, const std::vector<int>& Ls, Path path = Path::Auto);

}  // namespace lrising::observables
