#pragma once

#include <cstdint>
#include <vector>

#include "lrising/experiments/config.hpp"
#include "lrising/experiments/report.hpp"
#include "lrising/model/lattice.hpp"

namespace lrising::experiments {

// Each runner validates the config, computes its table and evaluates the thresholds named in
// the config. Missing thresholds that a runner needs raise ConfigError; optional ones only add
// checks when present.
//
//   wn-covariance      exponent_lo_factor, exponent_hi_factor (window x alpha/(alpha+1)),
//                      normalization_tol, gap_tol (all optional)
//   sigma-ratio        ratio_lo, exponent_tol
//   fgff-limit         gap_tol, kernel_tol; extrapolation_tol optional
//   fgff-limit-log     band_tol, extrapolation_tol; monotone_from_L optional
//   kernel-identity    kernel_tol, pizzetti_tol, moment_tol, moment_sigma
//   fourier-check      constants_tol, plancherel_tol
//   mc-validate        z_max, exact_tol
//   mc-twopoint        slope_tol; rhat_max optional
//   laplace-expansion  agreement_tol (deterministic) or residual_band (mc)
ReportTable run_wn_covariance(const ExperimentConfig& cfg);
ReportTable run_sigma_ratio(const ExperimentConfig& cfg);
ReportTable run_fgff_limit(const ExperimentConfig& cfg);
ReportTable run_fgff_limit_log(const ExperimentConfig& cfg);
ReportTable run_kernel_identity(const ExperimentConfig& cfg);
ReportTable run_fourier_check(const ExperimentConfig& cfg);
ReportTable run_mc_validate(const ExperimentConfig& cfg);
ReportTable run_mc_twopoint(const ExperimentConfig& cfg);
ReportTable run_laplace_expansion(const ExperimentConfig& cfg);

ReportTable run_experiment(const ExperimentConfig& cfg);

// Box shapes (sorted extents) in dimension d with 2 <= sites <= max_sites.
std::vector<std::vector<int>> box_shapes(int d, int max_sites);

// Unordered site pairs of a box grouped into orbits of its symmetry group (axis reflections,
// and permutations of axes with equal extent). Each orbit is listed once, pairs i < j.
std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> pair_orbits(const model::RectBox& box);

}  // namespace lrising::experiments
