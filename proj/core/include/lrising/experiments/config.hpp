#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lrising/fgff/fgff.hpp"
#include "lrising/mc/sampler.hpp"
#include "lrising/model/interaction.hpp"
#include "lrising/model/two_point.hpp"
#include "lrising/testfn/test_function.hpp"

namespace lrising::experiments {

enum class Kind {
  WnCovariance,
  SigmaRatio,
  FgffLimit,
  FgffLimitLog,
  KernelIdentity,
  FourierCheck,
  McValidate,
  McTwopoint,
  LaplaceExpansion,
};

std::string_view kind_name(Kind k);
Kind parse_kind(std::string_view s);  // ConfigError on unknown names
std::vector<Kind> all_kinds();
// One-line description for list-experiments.
std::string_view kind_summary(Kind k);

struct ModelDecl {
  std::string type = "synthetic";  // synthetic | independent
  int d = 2;
  double alpha = 1.0;
  std::optional<double> amplitude;  // A; default 1 / Z_d(d + alpha), which makes chi = 2
  double correction_c = 0.0;
  double correction_delta = 1.0;

  double resolved_amplitude() const;
  model::TwoPointModel build() const;
  bool operator==(const ModelDecl&) const = default;
};

struct FunctionDecl {
  std::string family = "gaussian";  // gaussian | bump | box
  std::vector<double> center;        // padded with zeros (or truncated) to the model dimension
  double scale = 1.0;                // Gaussian scale, bump radius or box half-width
  double amplitude = 1.0;

  testfn::TestFunction build(int d) const;
  bool operator==(const FunctionDecl&) const = default;
};

struct QuadratureDecl {
  int radial_nodes = 16;
  int angular_order = 24;
  int outer_nodes = 12;
  int outer_panels = 8;
  double epsilon = 0.05;
  int series_terms = 3;
  double r_max = 0.0;
  double tolerance = 1e-6;
  int max_refinements = 3;

  fgff::QuadratureConfig build() const;
  bool operator==(const QuadratureDecl&) const = default;
};

struct McDecl {
  std::string sampler = "metropolis";
  std::int64_t thermalization = 1000;
  std::int64_t measurement = 10000;
  std::int64_t stride = 1;
  std::vector<int> box{32, 32};
  double beta_fraction = 0.5;      // beta as a fraction of beta_mf (mc-twopoint, laplace MC mode)
  std::vector<double> betas;       // absolute betas (mc-validate)
  std::vector<std::vector<int>> boxes;  // mc-validate boxes; empty means every shape up to max_sites
  int max_sites = 16;
  double r_min = 4.0;              // mc-twopoint fit range in |x|
  double r_max = 16.0;
  int smear_L = 4;                 // laplace MC mode
  std::vector<double> z;
  std::int64_t sphere_samples = 10000000;  // kernel-identity sphere Monte Carlo

  mc::Sampler parsed_sampler() const;
  bool operator==(const McDecl&) const = default;
};

struct ExperimentConfig {
  std::string name;
  Kind kind = Kind::WnCovariance;
  std::uint64_t seed = 1;
  std::string output;
  std::string mode = "deterministic";  // laplace-expansion: deterministic | mc
  ModelDecl model;
  std::vector<FunctionDecl> functions{FunctionDecl{}};
  std::vector<int> L;
  int fit_min_L = 0;  // 0: largest decade of L
  std::vector<double> alphas;
  std::vector<int> dims;
  QuadratureDecl quadrature;
  McDecl mc;
  std::map<std::string, double> thresholds;

  // Throws ConfigError describing the first problem.
  void validate() const;
  // Threshold by name; ConfigError if the config does not define it.
  double threshold(const std::string& key) const;
  std::optional<double> maybe_threshold(const std::string& key) const;
  bool operator==(const ExperimentConfig&) const = default;
};

// Strict conversion: unknown or mistyped keys raise ConfigError naming the JSON path.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);
// Canonical text (2-space JSON) and its SHA-1, used as the content hash in reports.
std::string canonical_config(const ExperimentConfig& c);
std::string config_hash(const ExperimentConfig& c);
std::string sha1_hex(std::string_view data);

}  // namespace lrising::experiments
