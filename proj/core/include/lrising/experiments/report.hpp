#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace lrising::experiments {

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
  std::string note;
};

// A log-log panel: |y| against x for each listed y column. With `group` set, rows are split
// into one series per distinct value of that column. `notes` (fitted slopes and the like) are
// printed in the upper right corner.
struct PlotSpec {
  std::string title;
  std::string x;
  std::vector<std::string> y;
  std::string group;
  std::vector<std::string> notes;
};

struct ReportTable {
  std::string experiment;
  std::string kind;
  std::string statement;  // the property this experiment exercises
  std::string tool_version;
  std::string config_hash;
  nlohmann::ordered_json config;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<Check> checks;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<PlotSpec> plots;

  bool passed() const;
  std::size_t column(const std::string& name) const;  // LookupError if absent
  void add_row(std::vector<Cell> row);                 // DomainError on width mismatch
  Check& check(std::string name, double value, double lo, double hi, std::string note = {});
};

std::string tool_version();

enum class Format { Csv, Json, Svg };

// Writes <dir>/<experiment>.{csv,json,svg}; returns the paths written. SVG is skipped for
// tables without plots. Throws std::runtime_error on I/O failure.
std::vector<std::filesystem::path> emit_report(const ReportTable& t, const std::filesystem::path& dir,
                                               const std::vector<Format>& formats = {Format::Csv, Format::Json,
                                                                                     Format::Svg});

// RFC 4180 text: CRLF-free (LF line ends), fields quoted when they contain a comma, quote,
// newline or leading/trailing space; doubles in shortest round-trip form.
std::string to_csv(const std::vector<std::string>& columns, const std::vector<std::vector<Cell>>& rows);
std::string format_cell(const Cell& c);
// Parses the same dialect back into string fields (header first).
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

nlohmann::ordered_json to_json(const ReportTable& t);
ReportTable report_from_json(const nlohmann::json& j);
std::string to_svg(const ReportTable& t);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace lrising::experiments
