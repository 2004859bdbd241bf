#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lrising::model {

// G(x) = A |x|^-p (1 + c |x|^-delta) for x != 0, clamped into [0, 1]; G(0) = 1.
struct SyntheticDecay {
  int d = 2;
  double prefactor = 1.0;  // A
  double exponent = 3.0;   // p
  double correction_c = 0.0;
  double correction_delta = 1.0;
};

enum class ModelKind { Synthetic, Enumerated, Estimated };
enum class OutsideRange { Error, Zero };

// Dense table over the cube [-radius, radius]^d, last axis fastest.
struct CorrelationTable {
  int d = 2;
  int radius = 0;
  std::vector<double> values;
  std::vector<double> stderrs;  // empty when exact
  OutsideRange outside = OutsideRange::Error;

  std::int64_t side() const { return 2 * static_cast<std::int64_t>(radius) + 1; }
  std::int64_t offset(std::span<const int> z) const;  // -1 when outside the cube
};

// Evaluates r2 -> r2^{-s/2}. When 2s is an integer the power is split into an integer
// power of 1/r2 and a quarter power handled with one or two square roots.
class InversePower {
 public:
  // Multiplies out[i] by r2[i]^{-s/2}.
  void scale(const double* r2, double* out, std::size_t n) const;
  explicit InversePower(double s);
  double operator()(double r2) const {
    if (!general_) {
      const double base = ipow(1.0 / r2, whole_);
      switch (quarter_) {
        case 0: return base;
        case 1: return base / std::sqrt(std::sqrt(r2));
        case 2: return base / std::sqrt(r2);
        default: {
          const double q = std::sqrt(std::sqrt(r2));
          return base / (q * q * q);
        }
      }
    }
    return std::pow(r2, -0.5 * s_);
  }

 private:
  static double ipow(double b, int e) {
    double r = 1.0;
    while (e > 0) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }
  double s_;
  bool general_ = true;
  int whole_ = 0;
  int quarter_ = 0;
};

class TwoPointModel {
 public:
  static TwoPointModel synthetic(const SyntheticDecay& params);
  static TwoPointModel table(ModelKind kind, CorrelationTable table);
  // The beta = 0 model: G is the indicator of the origin.
  static TwoPointModel independent(int d);

  ModelKind kind() const { return kind_; }
  int dim() const;
  bool is_synthetic() const { return kind_ == ModelKind::Synthetic; }
  const SyntheticDecay& synthetic_params() const;
  const CorrelationTable& table_data() const;

  double operator()(std::span<const int> x) const;
  // Synthetic models only: G as a function of |x|^2.
  double radial(double r2) const {
    if (r2 == 0.0) return 1.0;
    double v = prefactor_ * (*main_pow_)(r2);
    if (corr_c_ != 0.0) v += prefactor_ * corr_c_ * (*corr_pow_)(r2);
    return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }
  // out[i] = radial(r2[i]); written as simple passes so the loops vectorize.
  void radial_batch(const double* r2, double* out, std::size_t n) const;
  double stderr_at(std::span<const int> x) const;

  // Decay exponent of the tail: p for synthetic models, +inf for tables with a zero tail,
  // empty when the tail is unknown.
  std::optional<double> decay_exponent() const;
  // Largest |x| at which the synthetic power law is clamped to 1 (0 when it never is).
  double clamp_radius() const;
  // Smallest r beyond which the synthetic value is the raw (unclamped) expression.
  double raw_radius() const;
  // Support radius in the infinity norm for tables with a zero tail; -1 otherwise.
  int support_radius() const;

  std::string describe() const;

 private:
  TwoPointModel() = default;
  ModelKind kind_ = ModelKind::Synthetic;
  std::variant<SyntheticDecay, CorrelationTable> data_;
  double raw_radius_ = 0.0;
  double prefactor_ = 0.0;
  double corr_c_ = 0.0;
  double clamp_radius_ = 0.0;
  std::optional<InversePower> main_pow_, corr_pow_;
};

double two_point(const TwoPointModel& model, std::span<const int> x);

// Table CSV: header z_1,...,z_d,value,stderr; one row per displacement.
void write_table_csv(std::ostream& os, const CorrelationTable& table);
CorrelationTable read_table_csv(std::istream& is, OutsideRange outside = OutsideRange::Error);

// Builds a dense table by averaging fn over the hyperoctahedral orbit of each displacement.
template <class Fn>
CorrelationTable symmetrized_table(int d, int radius, Fn&& fn);

// All 2^d d! signed-permutation images of z, repeats included.
std::vector<std::vector<int>> hyperoctahedral_orbit(std::span<const int> z);

}  // namespace lrising::model

namespace lrising::model {

template <class Fn>
CorrelationTable symmetrized_table(int d, int radius, Fn&& fn) {
  CorrelationTable t;
  t.d = d;
  t.radius = radius;
  const std::int64_t n = [&] {
    std::int64_t v = 1;
    for (int i = 0; i < d; ++i) v *= 2 * radius + 1;
    return v;
  }();
  t.values.assign(static_cast<std::size_t>(n), 0.0);
  std::vector<int> z(static_cast<std::size_t>(d));
  for (std::int64_t idx = 0; idx < n; ++idx) {
    std::int64_t r = idx;
    for (int i = d - 1; i >= 0; --i) {
      z[static_cast<std::size_t>(i)] = static_cast<int>(r % (2 * radius + 1)) - radius;
      r /= 2 * radius + 1;
    }
    const auto orbit = hyperoctahedral_orbit(z);
    double acc = 0.0;
    for (const auto& w : orbit) acc += fn(std::span<const int>(w));
    t.values[static_cast<std::size_t>(idx)] = acc / static_cast<double>(orbit.size());
  }
  return t;
}

}  // namespace lrising::model
