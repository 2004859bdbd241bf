#include "lrising/experiments/config.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <openssl/sha.h>

#include "lrising/errors.hpp"
#include "lrising/numerics/epstein.hpp"
#include "lrising/numerics/special.hpp"

namespace lrising::experiments {
namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

struct KindInfo {
  Kind kind;
  std::string_view name;
  std::string_view summary;
};

constexpr std::array<KindInfo, 9> kKinds{{
    {Kind::WnCovariance, "wn-covariance", "covariance of smeared spins against int f g, fitted decay of the gap"},
    {Kind::SigmaRatio, "sigma-ratio", "Sigma_L / (chi |Lambda_L|) and the rate of its deficit"},
    {Kind::FgffLimit, "fgff-limit", "L^alpha <R> against the fractional-field kernel (non-even alpha)"},
    {Kind::FgffLimitLog, "fgff-limit-log", "(L^alpha / log L) <R> against the Laplacian target (even alpha)"},
    {Kind::KernelIdentity, "kernel-identity", "full-Taylor vs Pizzetti kernels, Pizzetti reduction, sphere moments"},
    {Kind::FourierCheck, "fourier-check", "constants and the direct vs Fourier-side kernel for Gaussians"},
    {Kind::McValidate, "mc-validate", "samplers against exact enumeration; Ursell and tree-diagram checks"},
    {Kind::McTwopoint, "mc-twopoint", "power-law slope of the sampled two-point function"},
    {Kind::LaplaceExpansion, "laplace-expansion", "second-order variance expansion; sampled log-Laplace transform"},
}};

// Strict object reader: every key must be consumed, types must match.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }
  ~Reader() = default;

  bool has(const char* key) const { return j_.contains(key); }

  template <class T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const auto& v = j_.at(key);
    const std::string p = path_ + "." + key;
    check_type<T>(v, p);
    try {
      out = v.get<T>();
    } catch (const json::exception& e) {
      fail(p, e.what());
    }
  }

  const json& child(const char* key) {
    seen_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(path_ + "." + it.key(), "unknown key");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& why) {
    throw ConfigError("config " + path + ": " + why);
  }

 private:
  template <class T>
  static void check_type(const json& v, const std::string& p) {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(p, "expected a string");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(p, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(p, "expected an integer");
      if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)
        fail(p, "expected a nonnegative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(p, "expected a number");
    } else {
      if (!v.is_array()) fail(p, "expected an array");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

ModelDecl read_model(const json& j) {
  Reader r(j, "model");
  ModelDecl m;
  r.get("type", m.type);
  r.get("d", m.d);
  r.get("alpha", m.alpha);
  if (r.has("amplitude")) {
    const auto& a = r.child("amplitude");
    if (!a.is_null()) {
      if (!a.is_number()) Reader::fail("model.amplitude", "expected a number or null");
      m.amplitude = a.get<double>();
    }
  }
  r.get("correction_c", m.correction_c);
  r.get("correction_delta", m.correction_delta);
  r.finish();
  return m;
}

FunctionDecl read_function(const json& j, std::size_t i) {
  Reader r(j, "functions[" + std::to_string(i) + "]");
  FunctionDecl f;
  r.get("family", f.family);
  r.get("center", f.center);
  r.get("scale", f.scale);
  r.get("amplitude", f.amplitude);
  r.finish();
  return f;
}

QuadratureDecl read_quadrature(const json& j) {
  Reader r(j, "quadrature");
  QuadratureDecl q;
  r.get("radial_nodes", q.radial_nodes);
  r.get("angular_order", q.angular_order);
  r.get("outer_nodes", q.outer_nodes);
  r.get("outer_panels", q.outer_panels);
  r.get("epsilon", q.epsilon);
  r.get("series_terms", q.series_terms);
  r.get("r_max", q.r_max);
  r.get("tolerance", q.tolerance);
  r.get("max_refinements", q.max_refinements);
  r.finish();
  return q;
}

McDecl read_mc(const json& j) {
  Reader r(j, "mc");
  McDecl m;
  r.get("sampler", m.sampler);
  r.get("thermalization", m.thermalization);
  r.get("measurement", m.measurement);
  r.get("stride", m.stride);
  r.get("box", m.box);
  r.get("beta_fraction", m.beta_fraction);
  r.get("betas", m.betas);
  r.get("boxes", m.boxes);
  r.get("max_sites", m.max_sites);
  r.get("r_min", m.r_min);
  r.get("r_max", m.r_max);
  r.get("smear_L", m.smear_L);
  r.get("z", m.z);
  r.get("sphere_samples", m.sphere_samples);
  r.finish();
  return m;
}

}  // namespace

std::string_view kind_name(Kind k) {
  for (const auto& i : kKinds)
    if (i.kind == k) return i.name;
  return "?";
}

Kind parse_kind(std::string_view s) {
  for (const auto& i : kKinds)
    if (i.name == s) return i.kind;
  throw ConfigError("unknown experiment kind '" + std::string(s) + "'");
}

std::vector<Kind> all_kinds() {
  std::vector<Kind> v;
  for (const auto& i : kKinds) v.push_back(i.kind);
  return v;
}

std::string_view kind_summary(Kind k) {
  for (const auto& i : kKinds)
    if (i.kind == k) return i.summary;
  return "";
}

double ModelDecl::resolved_amplitude() const {
  if (amplitude) return *amplitude;
  return 1.0 / numerics::epstein_zeta(d, d + alpha);
}

model::TwoPointModel ModelDecl::build() const {
  if (type == "independent") return model::TwoPointModel::independent(d);
  if (type != "synthetic") throw ConfigError("model.type must be synthetic or independent, got '" + type + "'");
  return model::TwoPointModel::synthetic({d, resolved_amplitude(), d + alpha, correction_c, correction_delta});
}

testfn::TestFunction FunctionDecl::build(int d) const {
  std::vector<double> c(static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 0; i < c.size() && i < center.size(); ++i) c[i] = center[i];
  if (family == "gaussian") return testfn::TestFunction::gaussian(c, scale, amplitude);
  if (family == "bump") return testfn::TestFunction::bump(c, scale, amplitude);
  if (family == "box") {
    if (amplitude != 1.0) throw ConfigError("functions: the box family has unit amplitude");
    return testfn::TestFunction::box_indicator(c, scale);
  }
  throw ConfigError("functions: unknown family '" + family + "' (gaussian, bump, box)");
}

fgff::QuadratureConfig QuadratureDecl::build() const {
  fgff::QuadratureConfig q;
  q.radial_nodes = radial_nodes;
  q.angular_order = angular_order;
  q.outer_nodes = outer_nodes;
  q.outer_panels = outer_panels;
  q.epsilon = epsilon;
  q.series_terms = series_terms;
  q.r_max = r_max;
  q.tolerance = tolerance;
  q.max_refinements = max_refinements;
  return q;
}

mc::Sampler McDecl::parsed_sampler() const { return mc::parse_sampler(sampler); }

void ExperimentConfig::validate() const {
  if (name.empty()) throw ConfigError("config: name must be non-empty");
  if (name.find_first_of("/\\") != std::string::npos) throw ConfigError("config: name must not contain path separators");
  if (model.d < 1 || model.d > 3) throw ConfigError("model.d must be 1, 2 or 3");
  if (!(model.alpha > 0.0)) throw ConfigError("model.alpha must be positive");
  if (model.amplitude && !(*model.amplitude > 0.0)) throw ConfigError("model.amplitude must be positive");
  if (model.type != "synthetic" && model.type != "independent") throw ConfigError("model.type must be synthetic or independent");
  if (mode != "deterministic" && mode != "mc") throw ConfigError("mode must be deterministic or mc");
  for (const auto& f : functions) (void)f.build(model.d);
  for (std::size_t i = 0; i < L.size(); ++i) {
    if (L[i] < 1) throw ConfigError("L entries must be >= 1");
    if (i > 0 && L[i] <= L[i - 1]) throw ConfigError("L must be strictly increasing");
  }
  for (int d : dims)
    if (d < 1 || d > 3) throw ConfigError("dims entries must be 1, 2 or 3");
  for (double a : alphas)
    if (!(a > 0.0)) throw ConfigError("alphas entries must be positive");
  (void)mc.parsed_sampler();
  mc::ChainConfig{seed, mc.thermalization, mc.measurement, mc.parsed_sampler(), mc.stride}.validate();

  const bool needs_L = kind == Kind::WnCovariance || kind == Kind::SigmaRatio || kind == Kind::FgffLimit ||
                       kind == Kind::FgffLimitLog || (kind == Kind::LaplaceExpansion && mode == "deterministic");
  if (needs_L && L.empty()) throw ConfigError(std::string(kind_name(kind)) + ": L list is empty");
  if (functions.empty() && kind != Kind::SigmaRatio && kind != Kind::McValidate && kind != Kind::McTwopoint)
    throw ConfigError(std::string(kind_name(kind)) + ": at least one test function is required");
  if (kind == Kind::FgffLimitLog && !numerics::is_even_positive_integer(model.alpha))
    throw ConfigError("fgff-limit-log: alpha must be an even integer");
  if (kind == Kind::LaplaceExpansion && !(model.alpha < 2.0))
    throw ConfigError("laplace-expansion: unsupported alpha (the expansion is stated for alpha in (0, 2))");
  if ((kind == Kind::KernelIdentity) && (alphas.empty() || dims.empty()))
    throw ConfigError("kernel-identity: alphas and dims are required");
  if (kind == Kind::McValidate && mc.betas.empty()) throw ConfigError("mc-validate: mc.betas is required");
  if (kind == Kind::McTwopoint && !(mc.r_max > mc.r_min && mc.r_min > 0.0))
    throw ConfigError("mc-twopoint: need 0 < mc.r_min < mc.r_max");
  if (kind == Kind::LaplaceExpansion && mode == "mc" && mc.z.empty()) throw ConfigError("laplace-expansion: mc.z is required");
}

double ExperimentConfig::threshold(const std::string& key) const {
  const auto it = thresholds.find(key);
  if (it == thresholds.end()) throw ConfigError("thresholds." + key + " is required for " + std::string(kind_name(kind)));
  return it->second;
}

std::optional<double> ExperimentConfig::maybe_threshold(const std::string& key) const {
  const auto it = thresholds.find(key);
  if (it == thresholds.end()) return std::nullopt;
  return it->second;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  Reader r(j, "$");
  ExperimentConfig c;
  r.get("name", c.name);
  std::string kind;
  r.get("kind", kind);
  if (kind.empty()) Reader::fail("$.kind", "required");
  c.kind = parse_kind(kind);
  r.get("seed", c.seed);
  r.get("output", c.output);
  r.get("mode", c.mode);
  if (r.has("model")) c.model = read_model(r.child("model"));
  if (r.has("functions")) {
    const auto& fs = r.child("functions");
    if (!fs.is_array()) Reader::fail("$.functions", "expected an array");
    c.functions.clear();
    for (std::size_t i = 0; i < fs.size(); ++i) c.functions.push_back(read_function(fs[i], i));
  }
  r.get("L", c.L);
  r.get("fit_min_L", c.fit_min_L);
  r.get("alphas", c.alphas);
  r.get("dims", c.dims);
  if (r.has("quadrature")) c.quadrature = read_quadrature(r.child("quadrature"));
  if (r.has("mc")) c.mc = read_mc(r.child("mc"));
  if (r.has("thresholds")) {
    const auto& t = r.child("thresholds");
    if (!t.is_object()) Reader::fail("$.thresholds", "expected an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!it.value().is_number()) Reader::fail("$.thresholds." + it.key(), "expected a number");
      c.thresholds[it.key()] = it.value().get<double>();
    }
  }
  r.finish();
  c.validate();
  return c;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  ojson j;
  j["name"] = c.name;
  j["kind"] = kind_name(c.kind);
  j["seed"] = c.seed;
  j["output"] = c.output;
  j["mode"] = c.mode;
  j["model"] = {{"type", c.model.type},
                {"d", c.model.d},
                {"alpha", c.model.alpha},
                {"amplitude", c.model.amplitude ? ojson(*c.model.amplitude) : ojson(nullptr)},
                {"correction_c", c.model.correction_c},
                {"correction_delta", c.model.correction_delta}};
  auto& fs = j["functions"] = ojson::array();
  for (const auto& f : c.functions)
    fs.push_back({{"family", f.family}, {"center", f.center}, {"scale", f.scale}, {"amplitude", f.amplitude}});
  j["L"] = c.L;
  j["fit_min_L"] = c.fit_min_L;
  j["alphas"] = c.alphas;
  j["dims"] = c.dims;
  const auto& q = c.quadrature;
  j["quadrature"] = {{"radial_nodes", q.radial_nodes},   {"angular_order", q.angular_order},
                     {"outer_nodes", q.outer_nodes},     {"outer_panels", q.outer_panels},
                     {"epsilon", q.epsilon},             {"series_terms", q.series_terms},
                     {"r_max", q.r_max},                 {"tolerance", q.tolerance},
                     {"max_refinements", q.max_refinements}};
  const auto& m = c.mc;
  j["mc"] = {{"sampler", m.sampler},     {"thermalization", m.thermalization}, {"measurement", m.measurement},
             {"stride", m.stride},       {"box", m.box},                       {"beta_fraction", m.beta_fraction},
             {"betas", m.betas},         {"boxes", m.boxes},                   {"max_sites", m.max_sites},
             {"r_min", m.r_min},         {"r_max", m.r_max},                   {"smear_L", m.smear_L},
             {"z", m.z},                 {"sphere_samples", m.sphere_samples}};
  auto& t = j["thresholds"] = ojson::object();
  for (const auto& [k, v] : c.thresholds) t[k] = v;
  return j;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string canonical_config(const ExperimentConfig& c) { return config_to_json(c).dump(2); }

std::string sha1_hex(std::string_view data) {
  unsigned char md[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
  std::string out;
  char buf[3];
  for (unsigned char b : md) {
    std::snprintf(buf, sizeof buf, "%02x", b);
    out += buf;
  }
  return out;
}

std::string config_hash(const ExperimentConfig& c) {
  // Same framing as a git blob, so `git hash-object` on the canonical text reproduces it.
  const std::string body = canonical_config(c);
  return sha1_hex("blob " + std::to_string(body.size()) + '\0' + body);
}

}  // namespace lrising::experiments
