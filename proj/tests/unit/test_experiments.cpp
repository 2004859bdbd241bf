#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "generators.hpp"
#include "lrising/errors.hpp"
#include "lrising/experiments/config.hpp"
#include "lrising/experiments/report.hpp"
#include "lrising/experiments/runners.hpp"
#include "lrising/mc/enumerate.hpp"
#include "lrising/numerics/fit.hpp"
#include "lrising/numerics/special.hpp"
#include "lrising/testfn/test_function.hpp"

using namespace lrising;
using namespace lrising::experiments;
using numerics::CounterRng;

namespace {

ExperimentConfig random_config(CounterRng& r) {
  const auto kinds = all_kinds();
  ExperimentConfig c;
  c.kind = kinds[static_cast<std::size_t>(gen::int_in(r, 0, static_cast<int>(kinds.size()) - 1))];
  c.name = "cfg-" + std::to_string(r.below(100000));
  c.seed = r.next();
  c.output = r.uniform() < 0.5 ? "" : "out/" + c.name;
  c.model.d = gen::int_in(r, 2, 3);
  c.model.alpha = gen::real_in(r, 0.1, 1.9);
  if (r.uniform() < 0.5) c.model.amplitude = gen::real_in(r, 0.1, 2.0);
  c.model.correction_c = gen::real_in(r, -0.5, 0.5);
  c.model.correction_delta = gen::real_in(r, 0.1, 1.0);
  c.functions.clear();
  const int nf = gen::int_in(r, 1, 2);
  for (int i = 0; i < nf; ++i) {
    FunctionDecl f;
    f.family = r.uniform() < 0.5 ? "gaussian" : "bump";
    f.center = gen::point(r, c.model.d, 0.5);
    f.scale = gen::real_in(r, 0.5, 2.0);
    f.amplitude = gen::real_in(r, 0.5, 2.0);
    c.functions.push_back(f);
  }
  int L = 0;
  for (int i = gen::int_in(r, 1, 6); i > 0; --i) c.L.push_back(L += gen::int_in(r, 1, 50));
  c.fit_min_L = gen::int_in(r, 0, 8);
  c.alphas = {gen::real_in(r, 0.1, 3.0)};
  c.dims = {2, 3};
  c.quadrature.epsilon = gen::real_in(r, 0.01, 0.1);
  c.quadrature.tolerance = gen::real_in(r, 1e-8, 1e-4);
  c.mc.sampler = r.uniform() < 0.5 ? "metropolis" : "cluster";
  c.mc.measurement = gen::int_in(r, 10, 100000);
  c.mc.betas = {gen::real_in(r, 0.0, 0.5)};
  c.mc.boxes = {{2, gen::int_in(r, 2, 5)}};
  c.mc.z = {-0.5, 0.0, gen::real_in(r, 0.1, 1.0)};
  c.thresholds["tol"] = gen::real_in(r, 0.0, 1.0);
  c.thresholds["tiny"] = 1e-300 * r.uniform();
  if (c.kind == Kind::FgffLimitLog) c.model.alpha = 2.0;
  return c;
}

std::string random_text(CounterRng& r) {
  static const char alphabet[] = "ab ,\"\n\r;x-1.5e3";
  std::string s;
  for (int i = gen::int_in(r, 0, 8); i > 0; --i) s += alphabet[r.below(sizeof alphabet - 1)];
  return s;
}

ReportTable fixture_table() {
  ReportTable t;
  t.experiment = "fixture";
  t.kind = "wn-covariance";
  t.statement = "fixture";
  t.tool_version = "test";
  t.config_hash = "0";
  t.config = nlohmann::ordered_json::object();
  t.columns = {"case", "L", "gap"};
  for (int k = 0; k < 2; ++k)
    for (int L : {4, 8, 16, 32, 64}) t.add_row({"c" + std::to_string(k), std::int64_t{L}, (k + 1.0) / (L * std::sqrt(L))});
  t.check("slope", -1.5, -2.0, -1.0, "fixture");
  t.plots.push_back({"gap", "L", {"gap"}, "case", {"slope -1.500"}});
  return t;
}

ExperimentConfig base(Kind k, const std::string& name) {
  ExperimentConfig c;
  c.kind = k;
  c.name = name;
  return c;
}

}  // namespace

TEST_CASE("config round-trips through JSON unchanged (property)") {
  CounterRng r(1201);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_config(r);
    INFO("trial " << trial << " kind " << kind_name(c.kind));
    const auto text = canonical_config(c);
    const auto back = config_from_json(nlohmann::json::parse(text));
    CHECK(back == c);
    CHECK(canonical_config(back) == text);
    CHECK(config_hash(back) == config_hash(c));
  }
}

TEST_CASE("config rejects unknown keys and wrong types with the JSON path") {
  auto fails_with = [](const char* text, const char* fragment) {
    try {
      config_from_json(nlohmann::json::parse(text));
    } catch (const ConfigError& e) {
      return std::strstr(e.what(), fragment) != nullptr;
    }
    return false;
  };
  CHECK(fails_with(R"({"name":"a","kind":"sigma-ratio","L":[2],"bogus":1})", "bogus"));
  CHECK(fails_with(R"({"name":"a","kind":"sigma-ratio","L":[2],"model":{"alpah":1}})", "model.alpah"));
  CHECK(fails_with(R"({"name":"a","kind":"sigma-ratio","L":[2],"mc":{"sweeps":1}})", "mc.sweeps"));
  CHECK(fails_with(R"({"name":"a","kind":"wn-covariance","L":[2],"functions":[{"family":"gaussian","width":1}]})",
                   "width"));
  CHECK(fails_with(R"({"name":"a","kind":"sigma-ratio","L":[2],"seed":"x"})", "seed"));
  CHECK(fails_with(R"({"name":"a","kind":"sigma-ratio","L":[2],"thresholds":{"t":"x"}})", "thresholds.t"));
  CHECK(fails_with(R"({"name":"a","kind":"no-such-kind"})", "no-such-kind"));
}

TEST_CASE("config validation per kind") {
  auto c = base(Kind::SigmaRatio, "s");
  CHECK_THROWS_AS(c.validate(), ConfigError);  // empty L
  c.L = {4, 4};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.L = {4, 8};
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_AS(c.threshold("missing"), ConfigError);

  auto log = base(Kind::FgffLimitLog, "l");
  log.L = {8};
  log.model.alpha = 1.0;
  CHECK_THROWS_AS(log.validate(), ConfigError);
  log.model.alpha = 2.0;
  CHECK_NOTHROW(log.validate());

  auto lap = base(Kind::LaplaceExpansion, "x");
  lap.L = {8};
  lap.model.alpha = 2.5;
  CHECK_THROWS_AS(lap.validate(), ConfigError);
  CHECK_THROWS_AS(run_laplace_expansion(lap), ConfigError);

  auto ki = base(Kind::KernelIdentity, "k");
  CHECK_THROWS_AS(ki.validate(), ConfigError);

  auto named = base(Kind::SigmaRatio, "a/b");
  named.L = {4};
  CHECK_THROWS_AS(named.validate(), ConfigError);
}

TEST_CASE("sha1 and the git-blob framing") {
  CHECK(sha1_hex("abc") == "a9993e364706816aba3e25717850c26c9cd0d89d");
  CHECK(sha1_hex(std::string("blob 0\0", 7)) == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("format_double is the shortest round-trip text") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1e-12) == "1e-12");
  CHECK(format_double(-2.5) == "-2.5");
  CHECK(format_double(std::nan("")) == "nan");
  CounterRng r(77);
  for (int i = 0; i < 2000; ++i) {
    double v;
    const std::uint64_t bits = r.next();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("empty table gives a header-only CSV") {
  CHECK(to_csv({"a", "b c", "d,e"}, {}) == "a,b c,\"d,e\"\n");
  const auto parsed = parse_csv(to_csv({"a", "b"}, {}));
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0] == std::vector<std::string>{"a", "b"});
}

TEST_CASE("CSV -> parse -> CSV is the identity (fuzz)") {
  CounterRng r(4180);
  for (int trial = 0; trial < 300; ++trial) {
    const int ncol = gen::int_in(r, 1, 5);
    std::vector<std::string> cols;
    for (int i = 0; i < ncol; ++i) cols.push_back("c" + random_text(r));
    std::vector<std::vector<Cell>> rows;
    for (int k = gen::int_in(r, 0, 6); k > 0; --k) {
      std::vector<Cell> row;
      for (int i = 0; i < ncol; ++i) {
        switch (r.below(4)) {
          case 0: row.push_back(std::monostate{}); break;
          case 1: row.push_back(static_cast<std::int64_t>(r.next() >> 1) - (std::int64_t{1} << 61)); break;
          case 2: row.push_back(gen::real_in(r, -1e6, 1e6) * std::pow(10.0, gen::int_in(r, -20, 20))); break;
          default: row.push_back(random_text(r));
        }
      }
      rows.push_back(std::move(row));
    }
    const auto text = to_csv(cols, rows);
    const auto parsed = parse_csv(text);
    REQUIRE(parsed.size() == rows.size() + 1);
    CHECK(parsed[0] == cols);
    std::vector<std::vector<Cell>> as_strings;
    for (std::size_t k = 1; k < parsed.size(); ++k) {
      std::vector<Cell> row;
      for (std::size_t i = 0; i < parsed[k].size(); ++i) {
        row.push_back(parsed[k][i]);
        if (const auto* d = std::get_if<double>(&rows[k - 1][i])) CHECK(std::stod(parsed[k][i]) == *d);
        if (const auto* s = std::get_if<std::string>(&rows[k - 1][i])) CHECK(parsed[k][i] == *s);
      }
      as_strings.push_back(std::move(row));
    }
    CHECK(to_csv(parsed[0], as_strings) == text);
  }
}

TEST_CASE("SVG and JSON are byte-stable; JSON round-trips") {
  const auto t = fixture_table();
  const auto svg = to_svg(t);
  CHECK(svg == to_svg(fixture_table()));
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("case=c0") != std::string::npos);
  CHECK(svg.find("case=c1") != std::string::npos);
  CHECK(svg.find("slope -1.500") != std::string::npos);
  const auto j = to_json(t);
  CHECK(j["schema"] == "lrising.report/1");
  const auto back = report_from_json(nlohmann::json::parse(j.dump()));
  CHECK(to_json(back).dump() == j.dump());
  CHECK(to_svg(back) == svg);
}

TEST_CASE("emit_report writes the requested files") {
  const auto dir = std::filesystem::temp_directory_path() / "lrising_emit_test";
  std::filesystem::remove_all(dir);
  auto t = fixture_table();
  const auto written = emit_report(t, dir);
  CHECK(written.size() == 3);
  for (const auto& p : written) CHECK(std::filesystem::exists(p));
  t.plots.clear();
  t.experiment = "noplot";
  CHECK(emit_report(t, dir).size() == 2);
  CHECK_THROWS_AS(t.add_row({std::int64_t{1}}), DomainError);
  CHECK_THROWS_AS(t.column("nope"), LookupError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("box shapes and symmetry orbits") {
  CHECK(box_shapes(2, 16).size() == 26);
  CHECK(box_shapes(1, 5).size() == 4);
  const auto three = box_shapes(3, 8);
  CHECK(std::find(three.begin(), three.end(), std::vector<int>{2, 2, 2}) != three.end());
  CHECK(pair_orbits(model::RectBox({2, 2})).size() == 2);
  CHECK(pair_orbits(model::RectBox({1, 4})).size() == 4);

  // Exact correlations are constant on every orbit, and the orbits partition the pairs.
  CounterRng r(31);
  for (int trial = 0; trial < 12; ++trial) {
    const auto shapes = box_shapes(gen::int_in(r, 2, 3), 12);
    const auto ext = shapes[r.below(shapes.size())];
    const model::RectBox box(ext);
    const model::InteractionSpec spec{box.dim(), gen::real_in(r, 0.5, 2.5), 1.0};
    const auto e = mc::exact_enumerate(spec, gen::real_in(r, 0.05, 0.4), box);
    std::size_t total = 0;
    for (const auto& orbit : pair_orbits(box)) {
      total += orbit.size();
      const double ref = e.two_point(orbit.front().first, orbit.front().second);
      for (const auto& [i, j] : orbit) CHECK(e.two_point(i, j) == doctest::Approx(ref).epsilon(1e-12));
    }
    const auto n = static_cast<std::size_t>(box.size());
    CHECK(total == n * (n - 1) / 2);
  }
}

TEST_CASE("wn-covariance: indicator of the unit cube has zero gap and no fit") {
  auto c = base(Kind::WnCovariance, "cube");
  c.functions = {FunctionDecl{"box", {}, 1.0, 1.0}};
  c.L = {1, 2, 3, 5, 8};
  c.dims = {2, 3};
  const auto t = run_wn_covariance(c);
  for (const auto& row : t.rows) CHECK(std::get<double>(row[t.column("abs_gap")]) < 1e-12);
  for (const auto& cs : t.summary["cases"]) CHECK(cs["fit"].get<std::string>().find("skipped") == 0);
  CHECK(config_from_json(t.config) == c);
  CHECK(t.config_hash == config_hash(c));
}

TEST_CASE("wn-covariance: independent spins follow the Riemann-sum oracle") {
  auto c = base(Kind::WnCovariance, "riemann");
  c.model.type = "independent";
  c.L = {8, 16, 32, 64, 128};
  c.fit_min_L = 8;
  const auto t = run_wn_covariance(c);
  // Oracle: <T^2> = 2^d / |Lambda_L| * sum_x f(x/L)^2 with f(x) = exp(-pi |x|^2).
  for (const auto& row : t.rows) {
    const auto L = std::get<std::int64_t>(row[t.column("L")]);
    double s = 0.0;
    for (int k = -20 * static_cast<int>(L); k <= 20 * L; ++k) s += std::exp(-2.0 * numerics::kPi * static_cast<double>(k) * k / static_cast<double>(L * L));
    const double oracle = 4.0 * s * s / std::pow(2.0 * static_cast<double>(L) + 1.0, 2);
    CHECK(std::get<double>(row[t.column("covariance")]) == doctest::Approx(oracle).epsilon(1e-11));
  }
  const double expo = t.summary["cases"][0]["exponent"].get<double>();
  CHECK(expo > 0.5);  // faster than alpha / (alpha + 1) at alpha = 1
  CHECK(expo == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("wn-covariance: reported exponent equals an independent regression") {
  auto c = base(Kind::WnCovariance, "regression");
  c.L = {8, 16, 32, 64};
  c.fit_min_L = 8;
  const auto t = run_wn_covariance(c);
  // Ordinary least squares on (log L, log gap), written out by hand.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(t.rows.size());
  for (const auto& row : t.rows) {
    const double x = std::log(static_cast<double>(std::get<std::int64_t>(row[t.column("L")])));
    const double y = std::log(std::get<double>(row[t.column("abs_gap")]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(t.summary["cases"][0]["exponent"].get<double>() == doctest::Approx(-slope).epsilon(1e-10));
}

TEST_CASE("laplace-expansion deterministic: independent spins have no correction") {
  auto c = base(Kind::LaplaceExpansion, "beta0");
  c.model.type = "independent";
  c.L = {4, 8, 16};
  c.thresholds["agreement_tol"] = 1.0;
  const auto t = run_laplace_expansion(c);
  for (const auto& row : t.rows) CHECK(std::abs(std::get<double>(row[t.column("pair_rescaled")])) < 1e-12);
}

TEST_CASE("fourier-check report") {
  auto c = base(Kind::FourierCheck, "fc");
  c.thresholds = {{"constants_tol", 1e-10}, {"plancherel_tol", 1e-6}};
  const auto t = run_experiment(c);
  CHECK(t.passed());
  CHECK(t.checks.size() == 3);
}

TEST_CASE("mc-validate on a 2x2 box, reproducible from config and seed") {
  auto c = base(Kind::McValidate, "tiny");
  c.mc.boxes = {{2, 2}, {1, 3}};
  c.mc.betas = {0.2};
  c.mc.thermalization = 500;
  c.mc.measurement = 20000;
  c.seed = 3;
  c.thresholds = {{"z_max", 4.0}, {"exact_tol", 1e-12}};
  const auto a = run_experiment(c);
  CHECK(a.passed());
  CHECK(a.summary["comparisons"].get<int>() == 2 * (2 + 2));
  CHECK(to_json(a).dump() == to_json(run_experiment(c)).dump());
}

TEST_CASE("runners require their thresholds") {
  auto c = base(Kind::SigmaRatio, "nothr");
  c.L = {8, 16, 32};
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
}
