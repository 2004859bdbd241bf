#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrising/testfn/jet.hpp"
#include "lrising/testfn/multi_index.hpp"

namespace lrising::testfn {

enum class Family { CompactBump, GaussianEnvelope, PolynomialTimesBump, Polynomial, BoxIndicator };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct Monomial {
  std::vector<int> exponents;
  double coef = 0.0;
};

// Immutable smooth (or, for BoxIndicator, piecewise constant) function on R^d.
//   GaussianEnvelope     a exp(-pi |x - c|^2 / s^2)
//   CompactBump          a exp(-1 / (1 - |x - c|^2 / R^2)) for |x - c| < R, else 0
//   PolynomialTimesBump  p(x - c) * exp(-1 / (1 - |x - c|^2 / R^2))
//   Polynomial           p(x)
//   BoxIndicator         1 when |x - c|_inf <= h (derivatives of order 0 only)
class TestFunction {
 public:
  static constexpr int kDefaultOrder = 12;

  static TestFunction gaussian(std::vector<double> center, double scale = 1.0, double amplitude = 1.0,
                               int max_order = kDefaultOrder);
  static TestFunction bump(std::vector<double> center, double radius = 1.0, double amplitude = 1.0,
                           int max_order = kDefaultOrder);
  static TestFunction poly_bump(std::vector<Monomial> terms, std::vector<double> center, double radius = 1.0,
                                int max_order = kDefaultOrder);
  static TestFunction polynomial(int d, std::vector<Monomial> terms, int max_order = kDefaultOrder);
  static TestFunction box_indicator(std::vector<double> center, double half_width = 1.0);

  Family family() const { return family_; }
  int dim() const { return static_cast<int>(center_.size()); }
  const std::vector<double>& center() const { return center_; }
  double scale() const { return scale_; }
  double amplitude() const { return amplitude_; }
  const std::vector<Monomial>& terms() const { return terms_; }
  int max_derivative_order() const { return max_order_; }

  double operator()(std::span<const double> x) const;
  double derivative(const MultiIndex& g, std::span<const double> x) const;
  // All Taylor coefficients up to total order `order` at x.
  Jet jet(std::span<const double> x, int order) const;
  // Delta^j f(x).
  double laplacian_power(int j, std::span<const double> x) const;

  bool has_finite_support() const { return family_ != Family::Polynomial; }
  // R_supp for bumps and the indicator (Euclidean, around the center), R_eff for Gaussians.
  double support_radius() const;
  // [lo, hi] along one axis outside of which the function vanishes (or is below the R_eff threshold).
  std::pair<double, double> axis_support(int axis) const;
  double sup_norm() const;

  // Radial about center(): value depends only on |x - c|.
  bool is_radial() const;
  double radial_profile(double r) const;

  // Product of one-dimensional factors.
  bool is_separable() const { return family_ == Family::GaussianEnvelope || family_ == Family::BoxIndicator; }
  // k-th derivative of the axis factor at coordinate t; the amplitude sits on axis 0.
  double axis_factor(int axis, double t, int k = 0) const;

  std::string describe() const;

 private:
  TestFunction() = default;
  void check_order(int order) const;
  Jet bump_jet(std::span<const double> x, int order) const;
  Jet polynomial_jet(std::span<const double> x, int order, bool relative) const;

  Family family_ = Family::GaussianEnvelope;
  std::vector<double> center_;
  double scale_ = 1.0;
  double amplitude_ = 1.0;
  std::vector<Monomial> terms_;
  int max_order_ = kDefaultOrder;
};

double evaluate(const TestFunction& f, std::span<const double> x);
double partial_derivative(const TestFunction& f, const MultiIndex& g, std::span<const double> x);

// Largest even integer strictly below t (0 counts as even).
int floor2(double t);

// Sum over |gamma| <= m of d^gamma g(x) (y - x)^gamma / gamma!.
double taylor_polynomial(const TestFunction& g, int m, std::span<const double> x, std::span<const double> y);

struct RemainderOrderCheck {
  double exponent = 0.0;
  // Same fit for the average of the remainders along +v and -v, where the odd
  // leading term cancels.
  double symmetric_exponent = 0.0;
  std::vector<double> h;
  std::vector<double> remainder;
  std::vector<double> symmetric_remainder;
};

// Fits |g(x + h v) - Tay_m g(x + h v; x)| ~ h^k over h = 0.02 * 2^-i, i = 0..6.
// The default ray direction v is a fixed irrational unit vector.
RemainderOrderCheck taylor_remainder_order_check(const TestFunction& g, int m, std::span<const double> x,
                                                 std::span<const double> direction = {});

}  // namespace lrising::testfn
