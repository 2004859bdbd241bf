#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lrising/mc/sampler.hpp"
#include "lrising/model/lattice.hpp"
#include "lrising/observables/observables.hpp"

namespace lrising::mc {

// Mean of sigma_i sigma_j over a group of site pairs (box indices). Grouping pairs related by a
// symmetry of the box gives one lower-variance estimate per orbit.
struct PairGroup {
  std::string name;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
};

// Everything below is measured in absolute lattice coordinates; chi_k, Sigma_L and the
// smeared observables are centred on the coordinate origin, which must lie in the box.
struct Targets {
  std::vector<PairGroup> pairs;
  // Translation-averaged <sigma_0 sigma_x>, estimated with sigma_i tanh(beta h_{i+x}) (the
  // conditional expectation of sigma_{i+x} given the rest) symmetrised over x and -x.
  std::vector<model::Point> displacements;
  std::vector<int> chi_radii;
  std::vector<int> sigma_radii;
  // Total-spin moments M^2 / |box| and M^4 / |box|^2.
  bool magnetization = false;
  std::vector<observables::SmearedObservableSpec> smeared;
  std::vector<double> laplace_z;  // applied to every smeared target
  double rhat_threshold = 1.1;
  int bootstrap_replicates = 200;
};

struct Estimate {
  std::string name;
  double mean = 0.0;
  double error = 0.0;    // batch-means standard error
  double tau_int = 0.5;  // integrated autocorrelation time in measurements
  double rhat = 1.0;     // split-chain potential scale reduction
  std::int64_t samples = 0;
};

struct LaplacePoint {
  int target = 0;  // index into Targets::smeared
  double z = 0.0;
  double value = 0.0;  // mean of exp(z T)
  double error = 0.0;  // moving-block bootstrap standard deviation
  double log_value = 0.0;
  double log_error = 0.0;
  double gaussian = 0.0;  // exp(z^2 Var / 2) with Var the sample variance of T
};

struct Estimates {
  std::vector<Estimate> entries;
  std::vector<LaplacePoint> laplace;
  std::vector<std::vector<double>> smeared_samples;
  double max_rhat = 1.0;
  bool unthermalized = false;
  std::uint64_t seed = 0;
  std::string sampler;
  double beta = 0.0;

  // Throws LookupError for an unknown name.
  const Estimate& get(const std::string& name) const;
};

// Observable names used in Estimates::entries and in the measurement stream.
std::string displacement_name(std::span<const int> x);

// Runs one chain. When `stream` is given, every measurement is appended to it as a CSV record
// "sweep,observable,value" (header first); the record bytes depend only on the inputs.
Estimates estimate_observables(const ChainConfig& chain, const model::InteractionSpec& spec, double beta,
                               const model::RectBox& box, const Targets& targets, std::ostream* stream = nullptr);

void write_estimates_json(std::ostream& os, const Estimates& e);

// Statistics of a single time series.
double integrated_autocorrelation(std::span<const double> x);  // Sokal windowing, c = 6
double batch_means_error(std::span<const double> x, int batches = 100);
double split_rhat(std::span<const double> x, int chunks = 4);

// Fit of log <exp(zT)> = a z + b z^2 through the Laplace points of one target, weighted by the
// bootstrap errors. `worst` is the largest |residual| / (1.96 log_error).
struct QuadraticLaplaceFit {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> z;
  std::vector<double> residual;
  std::vector<double> band;
  double worst = 0.0;
};
QuadraticLaplaceFit fit_log_laplace(std::span<const LaplacePoint> points);

struct MeanFieldBeta {
  double beta_mf = 0.0;      // 1 / (C Z_d(d + alpha)), from the Epstein zeta value
  double truncated = 0.0;    // 1 / (sum over 0 < |x|_inf <= radius of J(0, x))
  double lower = 0.0;        // 1 / (truncated sum + tail bound)
  std::int64_t radius = 0;
};
MeanFieldBeta mean_field_beta(const model::InteractionSpec& spec, std::int64_t radius = 200);

struct BetaDiagnosticRow {
  double beta = 0.0;
  double chi_box = 0.0;  // <M^2> / |box|
  double chi_error = 0.0;
  double binder = 0.0;  // <M^4> / <M^2>^2, 3 for a Gaussian total spin
  double binder_error = 0.0;
  double beta_mf = 0.0;
  bool untrusted = false;  // beta >= 0.8 beta_mf
};

std::vector<BetaDiagnosticRow> beta_diagnostic(const model::InteractionSpec& spec, const model::RectBox& box,
                                               std::span<const double> betas, const ChainConfig& chain);

}  // namespace lrising::mc
