#include "lrising/experiments/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lrising/errors.hpp"

#ifndef LRISING_VERSION
#define LRISING_VERSION "0.0.0"
#endif

namespace lrising::experiments {
namespace {

using ojson = nlohmann::ordered_json;

bool needs_quotes(const std::string& s) {
  if (s.empty()) return false;
  if (s.front() == ' ' || s.back() == ' ') return true;
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

std::string quote(const std::string& s) {
  if (!needs_quotes(s)) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

ojson cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

Cell cell_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ConfigError("report: unsupported cell value " + j.dump());
}

std::optional<double> numeric(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  return std::nullopt;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

}  // namespace

std::string tool_version() { return LRISING_VERSION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else {
          return v;
        }
      },
      c);
}

bool ReportTable::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::size_t ReportTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw LookupError("report: no column " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

void ReportTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw DomainError("report: row width does not match the column schema");
  rows.push_back(std::move(row));
}

Check& ReportTable::check(std::string name, double value, double lo, double hi, std::string note) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.lo = lo;
  c.hi = hi;
  c.pass = std::isfinite(value) && value >= lo && value <= hi;
  c.note = std::move(note);
  checks.push_back(std::move(c));
  return checks.back();
}

std::string to_csv(const std::vector<std::string>& columns, const std::vector<std::vector<Cell>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ',';
    out += quote(columns[i]);
  }
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += quote(format_cell(r[i]));
    }
    out += '\n';
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      row.push_back(std::move(field));
      field.clear();
      out.push_back(std::move(row));
      row.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (quoted) throw DomainError("parse_csv: unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::ordered_json to_json(const ReportTable& t) {
  ojson j;
  j["schema"] = "lrising.report/1";
  j["experiment"] = t.experiment;
  j["kind"] = t.kind;
  j["statement"] = t.statement;
  j["tool_version"] = t.tool_version;
  j["config_hash"] = t.config_hash;
  j["passed"] = t.passed();
  j["config"] = t.config;
  j["columns"] = t.columns;
  auto& rows = j["rows"] = ojson::array();
  for (const auto& r : t.rows) {
    auto a = ojson::array();
    for (const auto& c : r) a.push_back(cell_json(c));
    rows.push_back(std::move(a));
  }
  auto& checks = j["checks"] = ojson::array();
  for (const auto& c : t.checks)
    checks.push_back({{"name", c.name},
                      {"value", std::isfinite(c.value) ? ojson(c.value) : ojson(nullptr)},
                      {"lo", std::isfinite(c.lo) ? ojson(c.lo) : ojson(format_double(c.lo))},
                      {"hi", std::isfinite(c.hi) ? ojson(c.hi) : ojson(format_double(c.hi))},
                      {"pass", c.pass},
                      {"note", c.note}});
  j["summary"] = t.summary;
  auto& plots = j["plots"] = ojson::array();
  for (const auto& p : t.plots)
    plots.push_back({{"title", p.title},
                     {"x", p.x},
                     {"y", p.y},
                     {"group", p.group},
                     {"notes", p.notes}});
  return j;
}

ReportTable report_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "lrising.report/1") throw ConfigError("report: unknown schema");
  ReportTable t;
  t.experiment = j.at("experiment").get<std::string>();
  t.kind = j.at("kind").get<std::string>();
  t.statement = j.at("statement").get<std::string>();
  t.tool_version = j.at("tool_version").get<std::string>();
  t.config_hash = j.at("config_hash").get<std::string>();
  t.config = j.at("config");
  t.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& r : j.at("rows")) {
    std::vector<Cell> row;
    for (const auto& c : r) row.push_back(cell_from_json(c));
    t.rows.push_back(std::move(row));
  }
  auto bound = [](const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    const auto s = v.get<std::string>();
    return s == "inf" ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  };
  for (const auto& c : j.at("checks")) {
    Check k;
    k.name = c.at("name").get<std::string>();
    k.value = c.at("value").is_null() ? std::numeric_limits<double>::quiet_NaN() : c.at("value").get<double>();
    k.lo = bound(c.at("lo"));
    k.hi = bound(c.at("hi"));
    k.pass = c.at("pass").get<bool>();
    k.note = c.at("note").get<std::string>();
    t.checks.push_back(std::move(k));
  }
  t.summary = j.at("summary");
  for (const auto& p : j.at("plots")) {
    PlotSpec s;
    s.title = p.at("title").get<std::string>();
    s.x = p.at("x").get<std::string>();
    s.y = p.at("y").get<std::vector<std::string>>();
    s.group = p.at("group").get<std::string>();
    s.notes = p.at("notes").get<std::vector<std::string>>();
    t.plots.push_back(std::move(s));
  }
  return t;
}

std::string to_svg(const ReportTable& t) {
  constexpr double W = 640, H = 420, left = 80, right = 24, top = 48, bottom = 56;
  std::ostringstream os;
  const double total_h = H * static_cast<double>(std::max<std::size_t>(t.plots.size(), 1));
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\"" << num(total_h)
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  struct Pt {
    double x, y;
  };
  struct Series {
    std::string label;
    std::vector<Pt> pts;
  };
  for (std::size_t p = 0; p < t.plots.size(); ++p) {
    const auto& spec = t.plots[p];
    const double y0 = H * static_cast<double>(p);
    const std::size_t xi = t.column(spec.x);
    const std::size_t gi = spec.group.empty() ? 0 : t.column(spec.group);

    std::vector<std::string> groups;
    for (const auto& r : t.rows) {
      const std::string g = spec.group.empty() ? std::string{} : format_cell(r[gi]);
      if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
    }
    std::vector<Series> series;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& yname : spec.y) {
      const std::size_t yi = t.column(yname);
      for (const auto& g : groups) {
        Series s;
        s.label = "|" + yname + "|";
        if (!spec.group.empty()) s.label += " " + spec.group + "=" + g;
        for (const auto& r : t.rows) {
          if (!spec.group.empty() && format_cell(r[gi]) != g) continue;
          const auto xv = numeric(r[xi]), yv = numeric(r[yi]);
          if (!xv || !yv || !(*xv > 0.0) || !(std::abs(*yv) > 0.0) || !std::isfinite(*yv)) continue;
          const Pt pt{std::log10(*xv), std::log10(std::abs(*yv))};
          s.pts.push_back(pt);
          xmin = std::min(xmin, pt.x);
          xmax = std::max(xmax, pt.x);
          ymin = std::min(ymin, pt.y);
          ymax = std::max(ymax, pt.y);
        }
        series.push_back(std::move(s));
      }
    }
    os << "<text x=\"" << num(W / 2) << "\" y=\"" << num(y0 + 24) << "\" text-anchor=\"middle\" font-size=\"14\">"
       << escape_xml(spec.title) << "</text>\n";
    if (xmin > xmax) {
      os << "<text x=\"" << num(W / 2) << "\" y=\"" << num(y0 + H / 2)
         << "\" text-anchor=\"middle\">no positive data</text>\n";
      continue;
    }
    xmin = std::floor(xmin);
    xmax = std::max(std::ceil(xmax), xmin + 1);
    ymin = std::floor(ymin);
    ymax = std::max(std::ceil(ymax), ymin + 1);
    const double pw = W - left - right, ph = H - top - bottom;
    auto sx = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double v) { return y0 + top + (ymax - v) / (ymax - ymin) * ph; };
    os << "<rect x=\"" << num(left) << "\" y=\"" << num(y0 + top) << "\" width=\"" << num(pw) << "\" height=\""
       << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    // Decade grid; with many decades only every k-th gets a label.
    const int ystep = std::max(1, static_cast<int>((ymax - ymin) / 8));
    for (double v = xmin; v <= xmax + 1e-9; v += 1.0)
      os << "<line x1=\"" << num(sx(v)) << "\" y1=\"" << num(sy(ymin)) << "\" x2=\"" << num(sx(v)) << "\" y2=\""
         << num(sy(ymax)) << "\" stroke=\"#dddddd\"/>\n<text x=\"" << num(sx(v)) << "\" y=\"" << num(sy(ymin) + 16)
         << "\" text-anchor=\"middle\">1e" << static_cast<int>(v) << "</text>\n";
    for (double v = ymin; v <= ymax + 1e-9; v += ystep)
      os << "<line x1=\"" << num(sx(xmin)) << "\" y1=\"" << num(sy(v)) << "\" x2=\"" << num(sx(xmax)) << "\" y2=\""
         << num(sy(v)) << "\" stroke=\"#dddddd\"/>\n<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(v) + 4)
         << "\" text-anchor=\"end\">1e" << static_cast<int>(v) << "</text>\n";
    os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(y0 + H - 12) << "\" text-anchor=\"middle\">"
       << escape_xml(spec.x) << "</text>\n";
    std::size_t legend = 0;
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (series[s].pts.empty()) continue;
      const char* colour = kPalette[s % (sizeof kPalette / sizeof *kPalette)];
      os << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
      for (std::size_t k = 0; k < series[s].pts.size(); ++k)
        os << (k ? " " : "") << num(sx(series[s].pts[k].x)) << ',' << num(sy(series[s].pts[k].y));
      os << "\"/>\n";
      for (const auto& pt : series[s].pts)
        os << "<circle cx=\"" << num(sx(pt.x)) << "\" cy=\"" << num(sy(pt.y)) << "\" r=\"3\" fill=\"" << colour
           << "\"/>\n";
      os << "<text x=\"" << num(left + 10) << "\" y=\"" << num(y0 + top + 16 + 14 * static_cast<double>(legend++))
         << "\" fill=\"" << colour << "\">" << escape_xml(series[s].label) << "</text>\n";
    }
    for (std::size_t k = 0; k < spec.notes.size(); ++k)
      os << "<text x=\"" << num(left + pw - 8) << "\" y=\"" << num(y0 + top + 16 + 14 * static_cast<double>(k))
         << "\" text-anchor=\"end\">" << escape_xml(spec.notes[k]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::filesystem::path> emit_report(const ReportTable& t, const std::filesystem::path& dir,
                                               const std::vector<Format>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (auto f : formats) {
    std::filesystem::path p = dir / t.experiment;
    switch (f) {
      case Format::Csv:
        p += ".csv";
        write_file(p, to_csv(t.columns, t.rows));
        break;
      case Format::Json:
        p += ".json";
        write_file(p, to_json(t).dump(2) + "\n");
        break;
      case Format::Svg:
        if (t.plots.empty()) continue;
        p += ".svg";
        write_file(p, to_svg(t));
        break;
    }
    written.push_back(p);
  }
  return written;
}

}  // namespace lrising::experiments
