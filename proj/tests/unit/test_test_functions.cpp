#include <doctest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "lrising/errors.hpp"
#include "lrising/numerics/rng.hpp"
#include "lrising/numerics/special.hpp"
#include "lrising/testfn/test_function.hpp"

using namespace lrising;
using namespace lrising::testfn;
using numerics::kPi;
using numerics::CounterRng;

namespace {

// Centered finite difference of order |g| with step h along each axis, built
// recursively from the 4th-order first-derivative stencil.
double fd(const TestFunction& f, std::vector<int> g, std::vector<double> x, double h) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] == 0) continue;
    g[i] -= 1;
    const double w[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
    const double off[4] = {-2, -1, 1, 2};
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      auto y = x;
      y[i] += off[k] * h;
      s += w[k] * fd(f, g, y, h);
    }
    return s / h;
  }
  return f(x);
}

}  // namespace

TEST_CASE("evaluate examples") {
  const auto gauss = TestFunction::gaussian({0.0, 0.0});
  CHECK(gauss(std::vector<double>{0.0, 0.0}) == 1.0);
  const auto bump = TestFunction::bump({0.0, 0.0});
  CHECK(bump(std::vector<double>{2.0, 0.0}) == 0.0);
  CHECK(bump(std::vector<double>{1.0, 0.0}) == 0.0);
  CHECK(bump(std::vector<double>{0.5, 0.0}) == doctest::Approx(0.26359713811572677).epsilon(1e-14));
}

TEST_CASE("partial_derivative examples") {
  const auto g = TestFunction::gaussian({0.0, 0.0});
  const std::vector<double> o{0.0, 0.0};
  CHECK(std::abs(g.derivative(MultiIndex{1, 0}, o)) < 1e-15);
  CHECK(g.derivative(MultiIndex{2, 0}, o) == doctest::Approx(-2.0 * kPi).epsilon(1e-14));
  CHECK(g.derivative(MultiIndex{4, 0}, o) == doctest::Approx(12.0 * kPi * kPi).epsilon(1e-13));
  const std::vector<double> x{0.3, -0.2};
  CHECK(g.derivative(MultiIndex{0, 0}, x) == g(x));
  const auto low = TestFunction::gaussian({0.0, 0.0}, 1.0, 1.0, 3);
  CHECK_THROWS_AS(low.derivative(MultiIndex{2, 2}, x), CapabilityError);
  const auto box = TestFunction::box_indicator({0.0, 0.0});
  CHECK_THROWS_AS(box.derivative(MultiIndex{1, 0}, x), CapabilityError);
}

TEST_CASE("bump derivatives against closed forms") {
  // 1D: b(x) = exp(-1/(1-x^2)); b'(x) = -2x/(1-x^2)^2 b(x).
  const auto b = TestFunction::bump({0.0});
  for (double x : {-0.7, -0.1, 0.35, 0.8}) {
    const double q = 1.0 - x * x;
    const double expect = -2.0 * x / (q * q) * std::exp(-1.0 / q);
    CHECK(b.derivative(MultiIndex{1}, std::vector<double>{x}) == doctest::Approx(expect).epsilon(1e-13));
  }
  // b''(0) = -2/e.
  CHECK(b.derivative(MultiIndex{2}, std::vector<double>{0.0}) == doctest::Approx(-2.0 / std::exp(1.0)).epsilon(1e-14));
  CHECK(b.derivative(MultiIndex{3}, std::vector<double>{1.5}) == 0.0);
}

TEST_CASE("property: derivatives match finite differences") {
  CounterRng rng(20240611);
  std::vector<TestFunction> fs;
  fs.push_back(TestFunction::gaussian({0.1, -0.3}, 1.3, 0.7));
  fs.push_back(TestFunction::bump({0.0, 0.2}, 1.5));
  fs.push_back(TestFunction::poly_bump({{{1, 0}, 2.0}, {{0, 2}, -1.0}, {{0, 0}, 0.5}}, {0.0, 0.0}, 1.2));
  fs.push_back(TestFunction::gaussian({0.0, 0.0, 0.1}, 0.9));
  fs.push_back(TestFunction::bump({0.0, 0.0, 0.0}, 1.0, 2.0));
  int checked = 0;
  for (const auto& f : fs) {
    const int d = f.dim();
    for (int trial = 0; trial < 12; ++trial) {
      std::vector<double> x(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = f.center()[static_cast<std::size_t>(i)] + gen::real_in(rng, -0.4, 0.4) * f.scale();
      std::vector<int> g(static_cast<std::size_t>(d));
      const int order = gen::int_in(rng, 1, 4);
      for (int k = 0; k < order; ++k) g[static_cast<std::size_t>(gen::int_in(rng, 0, d - 1))]++;
      const double exact = f.derivative(MultiIndex(g), x);
      // One Richardson step on the O(h^4) stencil.
      const double h = 0.02 * f.scale();
      const double approx = (16.0 * fd(f, g, x, h / 2) - fd(f, g, x, h)) / 15.0;
      const double scale = std::max(std::abs(exact), 1e-3 * std::pow(f.scale(), -order));
      CHECK_MESSAGE(std::abs(exact - approx) / scale < 1e-6, f.describe(), " order ", order);
      ++checked;
    }
  }
  CHECK(checked == 60);
}

TEST_CASE("laplacian_power") {
  // Delta exp(-pi|x|^2) = (4 pi^2 |x|^2 - 2 pi d) exp(-pi|x|^2).
  const auto g = TestFunction::gaussian({0.0, 0.0, 0.0});
  const std::vector<double> x{0.2, -0.1, 0.3};
  const double r2 = 0.04 + 0.01 + 0.09;
  CHECK(g.laplacian_power(1, x) == doctest::Approx((4 * kPi * kPi * r2 - 6 * kPi) * std::exp(-kPi * r2)).epsilon(1e-12));
  // Delta^2 at the origin in d=2: sum of d4/dx4, d4/dy4 and 2 d2x d2y = 2*12pi^2 + 2*4pi^2.
  const auto g2 = TestFunction::gaussian({0.0, 0.0});
  CHECK(g2.laplacian_power(2, std::vector<double>{0.0, 0.0}) == doctest::Approx(32 * kPi * kPi).epsilon(1e-12));
}

TEST_CASE("floor2") {
  CHECK(floor2(1.5) == 0);
  CHECK(floor2(2.0) == 0);
  CHECK(floor2(2.5) == 2);
  CHECK(floor2(4.0) == 2);
  CHECK(floor2(4.5) == 4);
  CHECK_THROWS_AS(floor2(0.0), DomainError);
  CHECK_THROWS_AS(floor2(-1.0), DomainError);
}

TEST_CASE("property: floor2") {
  CounterRng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double t = gen::real_in(rng, 1e-3, 20.0);
    const int k = floor2(t);
    CHECK(k % 2 == 0);
    CHECK(k < t);
    CHECK(k + 2 >= t);
  }
  for (int n = 1; n <= 10; ++n) CHECK(floor2(2.0 * n) + 2 == 2 * n);
}

TEST_CASE("taylor_polynomial examples") {
  const auto g = TestFunction::gaussian({0.0, 0.0});
  const std::vector<double> x{0.0, 0.0}, y{0.1, 0.0};
  CHECK(taylor_polynomial(g, 2, x, y) == doctest::Approx(1.0 - kPi * 0.01).epsilon(1e-14));
  CHECK(taylor_polynomial(g, 2, x, y) == doctest::Approx(0.96858).epsilon(1e-5));
  const std::vector<double> x2{0.3, 0.4};
  CHECK(taylor_polynomial(g, 0, x2, y) == g(x2));
  CHECK_THROWS_AS(taylor_polynomial(g, 3, x, y), DomainError);
  const auto affine = TestFunction::polynomial(2, {{{0, 0}, 1.5}, {{1, 0}, -2.0}, {{0, 1}, 0.25}});
  CHECK(taylor_polynomial(affine, 2, x2, y) == doctest::Approx(affine(y)).epsilon(1e-15));
}

TEST_CASE("property: taylor reproduces polynomials and is linear") {
  CounterRng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = gen::int_in(rng, 1, 3);
    const int m = 2 * gen::int_in(rng, 0, 3);
    std::vector<Monomial> terms;
    for (int k = 0; k < 5; ++k) {
      std::vector<int> e(static_cast<std::size_t>(d));
      const int deg = gen::int_in(rng, 0, m);
      for (int j = 0; j < deg; ++j) e[static_cast<std::size_t>(gen::int_in(rng, 0, d - 1))]++;
      terms.push_back({e, gen::real_in(rng, -2.0, 2.0)});
    }
    const auto p = TestFunction::polynomial(d, terms);
    const auto x = gen::point(rng, d, 1.0);
    const auto y = gen::point(rng, d, 1.0);
    const double exact = p(y);
    const double tay = taylor_polynomial(p, m, x, y);
    double mag = 0.0;
    for (const auto& t : terms) mag += std::abs(t.coef) * 8.0;
    CHECK(std::abs(tay - exact) <= 1e-12 * mag);

    // Linearity in g: Tay(a p + b q) = a Tay(p) + b Tay(q).
    auto scaled = terms;
    for (auto& t : scaled) t.coef *= -3.0;
    const double lhs_p = taylor_polynomial(TestFunction::polynomial(d, scaled), m, x, y);
    CHECK(lhs_p == doctest::Approx(-3.0 * tay).epsilon(1e-12));
  }
}

TEST_CASE("taylor remainder order") {
  const auto cubic = TestFunction::polynomial(2, {{{3, 0}, 1.0}, {{1, 2}, 0.5}, {{1, 0}, 2.0}});
  const std::vector<double> x{0.2, -0.4};
  CHECK(taylor_remainder_order_check(cubic, 2, x).exponent == doctest::Approx(3.0).epsilon(0.01));

  const auto g = TestFunction::gaussian({0.0, 0.0});
  const std::vector<double> generic{0.31, -0.17};
  const auto r0 = taylor_remainder_order_check(g, 0, generic);
  CHECK(std::abs(r0.exponent - 1.0) < 0.1);
  CHECK(std::abs(r0.symmetric_exponent - 2.0) < 0.1);
  const auto r2 = taylor_remainder_order_check(g, 2, generic);
  CHECK(std::abs(r2.exponent - 3.0) < 0.1);
  CHECK(std::abs(r2.symmetric_exponent - 4.0) < 0.1);

  // Even about x: the ray through the center kills the odd term.
  const std::vector<double> center{0.0, 0.0};
  CHECK(std::abs(taylor_remainder_order_check(g, 0, center).exponent - 2.0) < 0.1);
}
