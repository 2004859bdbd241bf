#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lrising/errors.hpp"
#include "lrising/experiments/config.hpp"
#include "lrising/experiments/report.hpp"
#include "lrising/experiments/runners.hpp"

namespace fs = std::filesystem;
namespace ex = lrising::experiments;

namespace {

// Exit codes: 0 all thresholds pass, 1 some threshold failed, 2 bad config or usage, 3 runtime error.
constexpr int kPass = 0, kFail = 1, kConfig = 2, kRuntime = 3;

fs::path output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("LRLAB_OUTPUT_ROOT"); env && *env) return env;
  return "results";
}

fs::path output_dir(const ex::ExperimentConfig& cfg, const fs::path& root) {
  if (cfg.output.empty()) return root / cfg.name;
  const fs::path p(cfg.output);
  return p.is_absolute() ? p : root / p;
}

std::vector<ex::Format> parse_formats(const std::vector<std::string>& names) {
  std::vector<ex::Format> out;
  for (const auto& n : names) {
    if (n == "csv") out.push_back(ex::Format::Csv);
    else if (n == "json") out.push_back(ex::Format::Json);
    else if (n == "svg") out.push_back(ex::Format::Svg);
    else throw lrising::ConfigError("unknown format '" + n + "' (csv, json, svg)");
  }
  return out;
}

void print_checks(const ex::ReportTable& t) {
  for (const auto& c : t.checks)
    std::printf("  %s %-34s %-14s in [%s, %s]%s%s\n", c.pass ? "pass" : "FAIL", c.name.c_str(),
                ex::format_double(c.value).c_str(), ex::format_double(c.lo).c_str(), ex::format_double(c.hi).c_str(),
                c.note.empty() ? "" : "  ", c.note.c_str());
}

int cmd_run(const std::vector<std::string>& configs, const std::string& root_flag,
            const std::vector<std::string>& format_names) {
  const auto formats = parse_formats(format_names);
  const auto root = output_root(root_flag);
  int status = kPass;
  for (const auto& path : configs) {
    const auto cfg = ex::load_config(path);
    const auto table = ex::run_experiment(cfg);
    const auto written = ex::emit_report(table, output_dir(cfg, root), formats);
    std::printf("%s %s (%s)\n", table.passed() ? "PASS" : "FAIL", cfg.name.c_str(), table.kind.c_str());
    print_checks(table);
    for (const auto& p : written) std::printf("  wrote %s\n", p.string().c_str());
    if (!table.passed()) status = kFail;
  }
  return status;
}

int cmd_validate(const std::vector<std::string>& configs) {
  for (const auto& path : configs) {
    const auto cfg = ex::load_config(path);
    std::printf("ok %s kind=%s hash=%s\n", cfg.name.c_str(), std::string(ex::kind_name(cfg.kind)).c_str(),
                ex::config_hash(cfg).c_str());
  }
  return kPass;
}

int cmd_report(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::vector<ex::Cell>> rows;
  int status = kPass;
  for (const auto& f : files) {
    std::ifstream in(f);
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("schema", "") != "lrising.report/1") continue;
    const auto t = ex::report_from_json(j);
    std::int64_t failing = 0;
    std::string names;
    for (const auto& c : t.checks)
      if (!c.pass) {
        ++failing;
        names += (names.empty() ? "" : ";") + c.name;
      }
    rows.push_back({t.experiment, t.kind, t.passed() ? "pass" : "fail", static_cast<std::int64_t>(t.checks.size()),
                    failing, names, t.config_hash, fs::relative(f, dir).string()});
    if (!t.passed()) status = kFail;
  }
  const std::vector<std::string> cols{"experiment", "kind", "status", "checks", "failing", "failing_checks",
                                      "config_hash", "file"};
  const auto csv = ex::to_csv(cols, rows);
  std::ofstream(fs::path(dir) / "summary.csv", std::ios::binary) << csv;
  std::fputs(csv.c_str(), stdout);
  if (rows.empty()) {
    std::fprintf(stderr, "lrlab: no reports found under %s\n", dir.c_str());
    return kConfig;
  }
  return status;
}

int cmd_list() {
  for (auto k : ex::all_kinds())
    std::printf("%-18s %s\n", std::string(ex::kind_name(k)).c_str(), std::string(ex::kind_summary(k)).c_str());
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lrlab: long-range Ising scaling-limit experiments"};
  app.set_version_flag("--version", ex::tool_version());
  app.require_subcommand(1);

  std::vector<std::string> run_configs, validate_configs, formats{"csv", "json", "svg"};
  std::string root, report_dir;
  auto* run = app.add_subcommand("run", "run experiments and write their reports");
  run->add_option("config", run_configs, "experiment config file(s)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output-root", root, "output root (default $LRLAB_OUTPUT_ROOT or ./results)");
  run->add_option("-f,--formats", formats, "report formats: csv json svg")->delimiter(',');
  auto* validate = app.add_subcommand("validate", "parse and validate configs without running them");
  validate->add_option("config", validate_configs, "experiment config file(s)")->required()->check(CLI::ExistingFile);
  auto* report = app.add_subcommand("report", "summarize the reports under a results directory");
  report->add_option("results-dir", report_dir, "directory holding report JSON files")
      ->required()
      ->check(CLI::ExistingDirectory);
  auto* list = app.add_subcommand("list-experiments", "list the experiment kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfig;
  }

  try {
    if (*run) return cmd_run(run_configs, root, formats);
    if (*validate) return cmd_validate(validate_configs);
    if (*report) return cmd_report(report_dir);
    if (*list) return cmd_list();
  } catch (const lrising::ConfigError& e) {
    std::fprintf(stderr, "lrlab: config error: %s\n", e.what());
    return kConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lrlab: error: %s\n", e.what());
    return kRuntime;
  }
  return kConfig;
}
