#include "lrising/model/two_point.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lrising/errors.hpp"

namespace lrising::model {

InversePower::InversePower(double s) : s_(s) {
  const double k = std::round(2.0 * s);
  if (std::abs(2.0 * s - k) < 1e-13 && k >= 0 && k < 400) {
    general_ = false;
    whole_ = static_cast<int>(k) / 4;
    quarter_ = static_cast<int>(k) % 4;
  }
}

void InversePower::scale(const double* r2, double* out, std::size_t n) const {
  if (general_) {
    for (std::size_t i = 0; i < n; ++i) out[i] *= std::pow(r2[i], -0.5 * s_);
    return;
  }
  // Build the denominator with multiplications and divide once.
  thread_local std::vector<double> den;
  den.resize(n);
  switch (quarter_) {
    case 1:
      for (std::size_t i = 0; i < n; ++i) den[i] = std::sqrt(std::sqrt(r2[i]));
      break;
    case 2:
      for (std::size_t i = 0; i < n; ++i) den[i] = std::sqrt(r2[i]);
      break;
    case 3:
      for (std::size_t i = 0; i < n; ++i) {
        const double q = std::sqrt(std::sqrt(r2[i]));
        den[i] = q * q * q;
      }
      break;
    default:
      for (std::size_t i = 0; i < n; ++i) den[i] = 1.0;
      break;
  }
  for (int e = 0; e < whole_; ++e)
    for (std::size_t i = 0; i < n; ++i) den[i] *= r2[i];
  for (std::size_t i = 0; i < n; ++i) out[i] /= den[i];
}

std::int64_t CorrelationTable::offset(std::span<const int> z) const {
  if (static_cast<int>(z.size()) != d) throw DomainError("CorrelationTable: dimension mismatch");
  std::int64_t idx = 0;
  for (int v : z) {
    if (v < -radius || v > radius) return -1;
    idx = idx * side() + (v + radius);
  }
  return idx;
}

namespace {

double raw_synthetic(const SyntheticDecay& s, double r) {
  return s.prefactor * std::pow(r, -s.exponent) * (1.0 + s.correction_c * std::pow(r, -s.correction_delta));
}

}  // namespace

TwoPointModel TwoPointModel::synthetic(const SyntheticDecay& p) {
  if (p.d < 1) throw DomainError("synthetic model: dimension must be positive");
  if (!(p.prefactor > 0.0)) throw DomainError("synthetic model: prefactor must be positive");
  if (!(p.exponent > 0.0)) throw DomainError("synthetic model: exponent must be positive");
  if (!(p.correction_delta > 0.0)) throw DomainError("synthetic model: correction exponent must be positive");
  TwoPointModel m;
  m.kind_ = ModelKind::Synthetic;
  m.data_ = p;
  m.main_pow_.emplace(p.exponent);
  m.corr_pow_.emplace(p.exponent + p.correction_delta);
  m.prefactor_ = p.prefactor;
  m.corr_c_ = p.correction_c;
  // Scan a log grid for the last radius where the raw expression leaves [0, 1].
  double last_bad = 0.0, last_clamped_high = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double r = std::pow(10.0, -3.0 + 9.0 * i / 4000.0);
    const double v = raw_synthetic(p, r);
    if (v > 1.0 || v < 0.0) last_bad = r;
    if (v >= 1.0) last_clamped_high = r;
  }
  if (last_bad >= 1e6) throw DomainError("synthetic model: correction term never settles into [0, 1]");
  auto refine = [&](double lo, auto pred) {
    double hi = lo * std::pow(10.0, 9.0 / 4000.0) * 1.0000001;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (pred(raw_synthetic(p, mid)) ? lo : hi) = mid;
    }
    return hi;
  };
  m.raw_radius_ = last_bad > 0.0 ? refine(last_bad, [](double v) { return v > 1.0 || v < 0.0; }) : 0.0;
  m.clamp_radius_ = last_clamped_high > 0.0 ? refine(last_clamped_high, [](double v) { return v >= 1.0; }) : 0.0;
  return m;
}

TwoPointModel TwoPointModel::table(ModelKind kind, CorrelationTable t) {
  if (kind == ModelKind::Synthetic) throw DomainError("table model: kind must be Enumerated or Estimated");
  if (t.d < 1 || t.radius < 0) throw DomainError("table model: bad shape");
  std::int64_t n = 1;
  for (int i = 0; i < t.d; ++i) n *= t.side();
  if (static_cast<std::int64_t>(t.values.size()) != n) throw DomainError("table model: value count mismatch");
  if (!t.stderrs.empty() && t.stderrs.size() != t.values.size())
    throw DomainError("table model: stderr count mismatch");
  const std::vector<int> zero(static_cast<std::size_t>(t.d), 0);
  if (std::abs(t.values[static_cast<std::size_t>(t.offset(zero))] - 1.0) > 1e-12)
    throw DomainError("table model: G(0) must equal 1");
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const double slack = t.stderrs.empty() ? 1e-12 : 5.0 * t.stderrs[i] + 1e-12;
    if (!(t.values[i] >= -slack && t.values[i] <= 1.0 + slack))
      throw DomainError("table model: values must lie in [0, 1]");
  }
  TwoPointModel m;
  m.kind_ = kind;
  m.data_ = std::move(t);
  return m;
}

TwoPointModel TwoPointModel::independent(int d) {
  CorrelationTable t;
  t.d = d;
  t.radius = 0;
  t.values = {1.0};
  t.outside = OutsideRange::Zero;
  return table(ModelKind::Enumerated, std::move(t));
}

int TwoPointModel::dim() const {
  return is_synthetic() ? std::get<SyntheticDecay>(data_).d : std::get<CorrelationTable>(data_).d;
}

const SyntheticDecay& TwoPointModel::synthetic_params() const {
  if (!is_synthetic()) throw CapabilityError("model is not synthetic");
  return std::get<SyntheticDecay>(data_);
}

const CorrelationTable& TwoPointModel::table_data() const {
  if (is_synthetic()) throw CapabilityError("model is not a table");
  return std::get<CorrelationTable>(data_);
}

void TwoPointModel::radial_batch(const double* r2, double* out, std::size_t n) const {
  for (std::size_t i = 0; i < n; ++i) out[i] = prefactor_;
  main_pow_->scale(r2, out, n);
  if (corr_c_ != 0.0) {
    std::vector<double> extra(n, prefactor_ * corr_c_);
    corr_pow_->scale(r2, extra.data(), n);
    for (std::size_t i = 0; i < n; ++i) out[i] += extra[i];
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = r2[i] == 0.0 ? 1.0 : std::clamp(out[i], 0.0, 1.0);
}

double TwoPointModel::operator()(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != dim()) throw DomainError("two_point: dimension mismatch");
  if (is_synthetic()) {
    double r2 = 0.0;
    for (int v : x) r2 += static_cast<double>(v) * v;
    return radial(r2);
  }
  const auto& t = std::get<CorrelationTable>(data_);
  const std::int64_t off = t.offset(x);
  if (off < 0) {
    if (t.outside == OutsideRange::Zero) return 0.0;
    throw LookupError("two_point: displacement outside the tabulated range");
  }
  return t.values[static_cast<std::size_t>(off)];
}

double TwoPointModel::stderr_at(std::span<const int> x) const {
  if (is_synthetic()) return 0.0;
  const auto& t = std::get<CorrelationTable>(data_);
  const std::int64_t off = t.offset(x);
  if (off < 0 || t.stderrs.empty()) return 0.0;
  return t.stderrs[static_cast<std::size_t>(off)];
}

std::optional<double> TwoPointModel::decay_exponent() const {
  if (is_synthetic()) return std::get<SyntheticDecay>(data_).exponent;
  if (std::get<CorrelationTable>(data_).outside == OutsideRange::Zero)
    return std::numeric_limits<double>::infinity();
  return std::nullopt;
}

double TwoPointModel::clamp_radius() const { return clamp_radius_; }
double TwoPointModel::raw_radius() const { return raw_radius_; }

int TwoPointModel::support_radius() const {
  if (is_synthetic()) return -1;
  const auto& t = std::get<CorrelationTable>(data_);
  return t.outside == OutsideRange::Zero ? t.radius : -1;
}

std::string TwoPointModel::describe() const {
  std::ostringstream os;
  if (is_synthetic()) {
    const auto& p = std::get<SyntheticDecay>(data_);
    os << "synthetic(d=" << p.d << ", A=" << p.prefactor << ", p=" << p.exponent;
    if (p.correction_c != 0.0) os << ", c=" << p.correction_c << ", delta=" << p.correction_delta;
    os << ")";
  } else {
    const auto& t = std::get<CorrelationTable>(data_);
    os << (kind_ == ModelKind::Enumerated ? "enumerated" : "estimated") << "(d=" << t.d << ", radius=" << t.radius
       << ")";
  }
  return os.str();
}

double two_point(const TwoPointModel& model, std::span<const int> x) { return model(x); }

std::vector<std::vector<int>> hyperoctahedral_orbit(std::span<const int> z) {
  const int d = static_cast<int>(z.size());
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    for (int signs = 0; signs < (1 << d); ++signs) {
      std::vector<int> w(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        const int v = z[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        w[static_cast<std::size_t>(i)] = (signs >> i) & 1 ? -v : v;
      }
      out.push_back(std::move(w));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

void write_table_csv(std::ostream& os, const CorrelationTable& t) {
  for (int i = 0; i < t.d; ++i) os << "z_" << (i + 1) << ",";
  os << "value,stderr\n";
  std::int64_t n = 1;
  for (int i = 0; i < t.d; ++i) n *= t.side();
  std::vector<int> z(static_cast<std::size_t>(t.d));
  char buf[64];
  for (std::int64_t idx = 0; idx < n; ++idx) {
    std::int64_t r = idx;
    for (int i = t.d - 1; i >= 0; --i) {
      z[static_cast<std::size_t>(i)] = static_cast<int>(r % t.side()) - t.radius;
      r /= t.side();
    }
    for (int v : z) os << v << ",";
    std::snprintf(buf, sizeof buf, "%.17g", t.values[static_cast<std::size_t>(idx)]);
    os << buf << ",";
    std::snprintf(buf, sizeof buf, "%.17g", t.stderrs.empty() ? 0.0 : t.stderrs[static_cast<std::size_t>(idx)]);
    os << buf << "\n";
  }
}

CorrelationTable read_table_csv(std::istream& is, OutsideRange outside) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("read_table_csv: empty input");
  const int cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  const int d = cols - 2;
  if (d < 1) throw DomainError("read_table_csv: need z_1..z_d,value,stderr columns");
  std::map<std::vector<int>, std::pair<double, double>> rows;
  int radius = 0;
  bool any_err = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<int> z;
    double v = 0, e = 0;
    for (int c = 0; c < cols; ++c) {
      if (!std::getline(ss, cell, ',')) throw DomainError("read_table_csv: short row");
      if (c < d) {
        z.push_back(std::stoi(cell));
        radius = std::max(radius, std::abs(z.back()));
      } else if (c == d) {
        v = std::stod(cell);
      } else {
        e = std::stod(cell);
      }
    }
    any_err = any_err || e != 0.0;
    rows[z] = {v, e};
  }
  CorrelationTable t;
  t.d = d;
  t.radius = radius;
  t.outside = outside;
  std::int64_t n = 1;
  for (int i = 0; i < d; ++i) n *= t.side();
  t.values.assign(static_cast<std::size_t>(n), 0.0);
  if (any_err) t.stderrs.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const auto& [z, ve] : rows) {
    const auto off = static_cast<std::size_t>(t.offset(z));
    t.values[off] = ve.first;
    if (any_err) t.stderrs[off] = ve.second;
    seen[off] = true;
  }
  // Missing displacements are filled from any tabulated symmetry image.
  std::vector<int> z(static_cast<std::size_t>(d));
  for (std::int64_t idx = 0; idx < n; ++idx) {
    if (seen[static_cast<std::size_t>(idx)]) continue;
    std::int64_t r = idx;
    for (int i = d - 1; i >= 0; --i) {
      z[static_cast<std::size_t>(i)] = static_cast<int>(r % t.side()) - radius;
      r /= t.side();
    }
    bool filled = false;
    for (const auto& w : hyperoctahedral_orbit(z)) {
      auto it = rows.find(w);
      if (it != rows.end()) {
        t.values[static_cast<std::size_t>(idx)] = it->second.first;
        if (any_err) t.stderrs[static_cast<std::size_t>(idx)] = it->second.second;
        filled = true;
        break;
      }
    }
    if (!filled) throw LookupError("read_table_csv: displacement missing from table");
  }
  return t;
}

}  // namespace lrising::model
