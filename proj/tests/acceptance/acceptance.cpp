// Acceptance driver: one PASS/FAIL line per criterion on stdout, check details on stderr.
//
//   acceptance                 run every criterion
//   acceptance --criterion 4   run one (repeatable)
//   acceptance --output DIR    also write the underlying reports
//
// The criteria run the shipped configs under configs/acceptance. Their tolerances are pinned
// below; a config whose thresholds differ from the pinned values fails its criterion.

#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrising/experiments/config.hpp"
#include "lrising/experiments/report.hpp"
#include "lrising/experiments/runners.hpp"

#ifndef LRISING_CONFIG_DIR
#define LRISING_CONFIG_DIR "configs/acceptance"
#endif

namespace ex = lrising::experiments;
using Pinned = std::map<std::string, double>;

namespace {

struct Run {
  std::string config;             // file stem under configs/acceptance
  Pinned tolerances;              // must equal the config's thresholds exactly
  std::vector<std::string> only;  // check-name prefixes that count; empty means all
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Run> runs;
};

std::vector<Criterion> criteria() {
  const Pinned norm{{"normalization_tol", 1e-12}};
  const Pinned fgff{{"gap_tol", 0.02}, {"kernel_tol", 1e-4}};
  const Pinned fourier{{"constants_tol", 1e-10}, {"plancherel_tol", 1e-6}};
  return {
      {1,
       "normalization: covariance of the cube indicator is 1 for L <= 64, d in {2,3}, every model",
       {{"ac01-normalization-synthetic", norm, {}},
        {"ac01-normalization-corrected", norm, {}},
        {"ac01-normalization-independent", norm, {}}}},
      {2,
       "white-noise rate: fitted exponent in [0.7,1.3] alpha/(alpha+1), alpha in {0.5,1,2}",
       {{"ac02-white-noise-rate", {{"exponent_lo_factor", 0.7}, {"exponent_hi_factor", 1.3}}, {}}}},
      {3,
       "Sigma_L ratio in (0.98,1] at L=512 and rate exponent within 0.15 of alpha/(alpha+1)",
       {{"ac03-sigma-ratio", {{"ratio_lo", 0.98}, {"exponent_tol", 0.15}}, {}}}},
      {4,
       "fractional-field limit within 2% at L=256 for five (d,alpha), kernel error <= 1e-4",
       {{"ac04-fgff-limit-d2-a0.5", fgff, {}},
        {"ac04-fgff-limit-d2-a1.0", fgff, {}},
        {"ac04-fgff-limit-d2-a1.5", fgff, {}},
        {"ac04-fgff-limit-d2-a2.5", fgff, {}},
        {"ac04-fgff-limit-d3-a1.0", fgff, {}}}},
      {5,
       "even branch alpha=2: monotone, within 10% at L=512, extrapolation within 3%",
       {{"ac05-fgff-limit-log", {{"band_tol", 0.10}, {"extrapolation_tol", 0.03}}, {}}}},
      {6,
       "kernel identity <= 1e-4, Pizzetti <= 1e-10, sphere moments exact and within 4 sigma of MC",
       {{"ac06-kernel-identity",
         {{"kernel_tol", 1e-4}, {"pizzetti_tol", 1e-10}, {"moment_tol", 1e-12}, {"moment_sigma", 4.0}},
         {}}}},
      {7, "constants C(1,2), C(1,3), H_0, H_1 to 1e-10", {{"ac07-08-constants-fourier", fourier, {"constants"}}}},
      {8, "Plancherel: alpha=2, d=2 Gaussian equals 1/(4 pi) on both sides to 1e-6",
       {{"ac07-08-constants-fourier", fourier, {"plancherel"}}}},
      {9,
       "samplers within 3 sigma of enumeration on every box <= 16 sites; U4 <= 0, tree bound, odd = 0",
       {{"ac09-mc-validate", {{"z_max", 3.0}, {"exact_tol", 1e-12}}, {}}}},
      {10, "64x64 two-point slope within 0.5 of -(d+alpha) at beta = beta_mf/2",
       {{"ac10-mc-twopoint", {{"slope_tol", 0.5}}, {}}}},
      {11, "32x32 log-Laplace transform quadratic within the bootstrap band on z in [-1,1]",
       {{"ac11-laplace-mc", {{"residual_band", 1.0}}, {}}}},
  };
}

bool selected(const ex::Check& c, const std::vector<std::string>& only) {
  if (only.empty()) return true;
  for (const auto& p : only)
    if (c.name.rfind(p, 0) == 0) return true;
  return false;
}

bool run_criterion(const Criterion& cr, const std::string& output) {
  bool pass = true;
  std::string detail;
  for (const auto& run : cr.runs) {
    const auto path = std::filesystem::path(LRISING_CONFIG_DIR) / (run.config + ".json");
    try {
      const auto cfg = ex::load_config(path.string());
      if (std::map<std::string, double>(cfg.thresholds.begin(), cfg.thresholds.end()) != run.tolerances) {
        std::fprintf(stderr, "AC%d %s: thresholds differ from the pinned tolerances\n", cr.id, run.config.c_str());
        pass = false;
        detail += run.config + ": thresholds not pinned; ";
        continue;
      }
      const auto t = ex::run_experiment(cfg);
      if (!output.empty()) ex::emit_report(t, std::filesystem::path(output) / cfg.name);
      int failed = 0;
      for (const auto& c : t.checks) {
        if (!selected(c, run.only)) continue;
        std::fprintf(stderr, "AC%d %s %s %s = %s in [%s, %s]%s%s\n", cr.id, c.pass ? "pass" : "FAIL",
                     run.config.c_str(), c.name.c_str(), ex::format_double(c.value).c_str(),
                     ex::format_double(c.lo).c_str(), ex::format_double(c.hi).c_str(), c.note.empty() ? "" : "  ",
                     c.note.c_str());
        if (!c.pass) {
          ++failed;
          detail += c.name + "=" + ex::format_double(c.value) + "; ";
        }
      }
      pass = pass && failed == 0;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "AC%d %s: error: %s\n", cr.id, run.config.c_str(), e.what());
      detail += run.config + ": " + e.what() + "; ";
      pass = false;
    }
  }
  std::printf("AC%-2d %s  %s%s%s\n", cr.id, pass ? "PASS" : "FAIL", cr.title.c_str(), detail.empty() ? "" : "  | ",
              detail.c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  std::string output;
  app.add_option("-c,--criterion", only, "criterion number(s) to run")->check(CLI::Range(1, 11));
  app.add_option("-o,--output", output, "write the reports under this directory");
  CLI11_PARSE(app, argc, argv);

  const std::set<int> want(only.begin(), only.end());
  bool all = true;
  for (const auto& cr : criteria()) {
    if (!want.empty() && !want.count(cr.id)) continue;
    all = run_criterion(cr, output) && all;
  }
  return all ? 0 : 1;
}
