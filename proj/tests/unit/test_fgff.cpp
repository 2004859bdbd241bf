#include <doctest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "lrising/errors.hpp"
#include "lrising/fgff/fgff.hpp"
#include "lrising/numerics/quadrature.hpp"
#include "lrising/numerics/rng.hpp"
#include "lrising/numerics/special.hpp"

using namespace lrising;
using namespace lrising::fgff;
using numerics::CounterRng;
using numerics::kPi;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("constants") {
  CHECK(rel(constant_C(1.0, 2), -1.0 / (2 * kPi)) < 1e-12);
  CHECK(rel(constant_C(1.0, 3), -1.0 / (kPi * kPi)) < 1e-12);
  CHECK_THROWS_AS(constant_C(2.0, 2), PoleError);
  CHECK_THROWS_AS(constant_C(4.0, 3), PoleError);
  CHECK(rel(constant_H(0, 2), 2 * kPi) < 1e-14);
  CHECK(rel(constant_H(1, 2), kPi / 2) < 1e-14);
  CHECK(rel(constant_H(1, 3), 2 * kPi / 3) < 1e-14);
  for (int d = 1; d <= 5; ++d) CHECK(rel(constant_H(0, d), omega(d)) < 1e-15);
  // sign(C) = sign(Gamma(-alpha/2)): negative on (0, 2), positive on (2, 4), negative on (4, 6).
  CHECK(constant_C(0.7, 2) < 0);
  CHECK(constant_C(3.1, 2) > 0);
  CHECK(constant_C(5.5, 3) < 0);
  const auto c = constants(2.5, 3);
  CHECK(c.H.size() == 2);
  CHECK(c.hurst == doctest::Approx(-2.75));
  CHECK(std::isnan(constants(2.0, 2).c_alpha_d));
}

TEST_CASE("spherical moments") {
  CHECK(spherical_moment(MultiIndex{2, 0}, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(spherical_moment(MultiIndex{4, 0}, 2) == doctest::Approx(3.0 / 8).epsilon(1e-15));
  CHECK(spherical_moment(MultiIndex{2, 2, 0}, 3) == doctest::Approx(1.0 / 15).epsilon(1e-15));
  CHECK(spherical_moment(MultiIndex{3, 1}, 2) == 0.0);
  for (int d = 1; d <= 6; ++d) {
    double tr = 0.0;
    for (int i = 0; i < d; ++i) {
      std::vector<int> g(static_cast<std::size_t>(d));
      g[static_cast<std::size_t>(i)] = 2;
      tr += spherical_moment(MultiIndex(g), d);
    }
    CHECK(tr == doctest::Approx(1.0).epsilon(1e-15));
  }
  // Against the exact sphere rules of the quadrature module.
  for (int d : {2, 3}) {
    const auto rule = numerics::sphere_rule(d, 8);
    for (const auto& g : testfn::multi_indices(d, 6)) {
      double s = 0.0;
      for (std::size_t p = 0; p < rule.size(); ++p) s += rule.weights[p] * g.power(std::span<const double>(rule.point(p), static_cast<std::size_t>(d)));
      CHECK(std::abs(s - spherical_moment(g, d)) < 1e-14);
    }
  }
}

TEST_CASE("spherical moments: Monte Carlo") {
  CounterRng rng(77);
  const int n = 200000;
  const MultiIndex g{2, 2, 0};
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    // Marsaglia: normalized Gaussian vectors via Box-Muller.
    double v[3];
    for (double& c : v) {
      const double u1 = 1.0 - rng.uniform(), u2 = rng.uniform();
      c = std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * kPi * u2);
    }
    const double r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    const double x = v[0] * v[0] * v[1] * v[1] / (r2 * r2);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n, sd = std::sqrt((s2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0 / 15) < 4 * sd);
}

TEST_CASE("pizzetti reduction") {
  const auto g = TestFunction::gaussian({0.0, 0.0});
  const std::vector<double> o{0.0, 0.0};
  const auto r1 = pizzetti_reduce(g, 1, std::vector<double>{0.2, 0.3});
  CHECK(std::abs(r1.difference) < 1e-13);
  CHECK(r1.laplacian_side == doctest::Approx(g.laplacian_power(1, std::vector<double>{0.2, 0.3}) / 2).epsilon(1e-14));
  const auto r2 = pizzetti_reduce(g, 2, o);
  CHECK(std::abs(r2.difference) < 1e-10);
  // Delta^2 exp(-pi|x|^2) at 0 in d = 2 is 32 pi^2.
  CHECK(r2.laplacian_side == doctest::Approx(32 * kPi * kPi / 8).epsilon(1e-13));
  const auto quartic = TestFunction::polynomial(2, {{{4, 0}, 1.0}, {{2, 2}, 2.0}, {{0, 4}, 1.0}});
  const auto rq = pizzetti_reduce(quartic, 2, std::vector<double>{0.4, -1.1});
  CHECK(rq.multi_index_side == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(rq.laplacian_side == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("property: pizzetti difference vanishes for j <= 3") {
  CounterRng rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = gen::int_in(rng, 2, 3);
    const int j = gen::int_in(rng, 0, 3);
    const auto c = gen::point(rng, d, 0.5);
    TestFunction g = (trial % 3 == 0)   ? TestFunction::gaussian(c, gen::real_in(rng, 0.5, 1.5))
                     : (trial % 3 == 1) ? TestFunction::bump(c, gen::real_in(rng, 1.0, 2.0))
                                        : TestFunction::poly_bump({{std::vector<int>(static_cast<std::size_t>(d), 1), 1.0}}, c, 1.5);
    const auto x = gen::point(rng, d, 0.4);
    const auto r = pizzetti_reduce(g, j, x);
    const double scale = std::max(1.0, std::abs(r.laplacian_side));
    CHECK(std::abs(r.difference) < 1e-10 * scale);
  }
}

TEST_CASE("k_fgff: Gaussian even branch and Fourier side") {
  const auto g = TestFunction::gaussian({0.0, 0.0});
  const auto k = k_fgff(g, g, 2.0);
  CHECK(rel(k.value, 1.0 / (4 * kPi)) < 1e-6);
  CHECK(rel(fourier_side(g, g, 2.0), 1.0 / (4 * kPi)) < 1e-13);
  // alpha = 0: Plancherel.
  const auto h = TestFunction::gaussian({0.3, -0.1}, 0.7, 1.5);
  const double fg = 1.5 * std::pow(0.7 * 0.7 / (1 + 0.49), 1.0) * std::exp(-kPi * 0.1 / (1 + 0.49));
  CHECK(rel(fourier_side(g, h, 0.0), fg) < 1e-12);
  CHECK_THROWS_AS(fourier_side(TestFunction::bump({0.0, 0.0}), g, 1.0), CapabilityError);
}

TEST_CASE("k_tilde rejects even alpha") {
  const auto g = TestFunction::gaussian({0.0, 0.0});
  CHECK_THROWS_AS(k_tilde(g, g, 2.0), DivergenceError);
}

TEST_CASE("k_tilde: polynomial of degree <= floor2(alpha) gives zero") {
  const auto f = TestFunction::gaussian({0.0, 0.0}, 0.5);
  QuadratureConfig q;
  q.r_max = 3.0;
  q.outer_panels = 3;
  q.angular_order = 8;
  q.max_refinements = 1;
  const auto p1 = TestFunction::polynomial(2, {{{0, 0}, 1.0}, {{1, 0}, 2.0}});
  CHECK(std::abs(k_tilde(f, p1, 1.0, q).value) < 1e-10);
  const auto p2 = TestFunction::polynomial(2, {{{2, 0}, 1.0}, {{1, 1}, -0.5}, {{0, 2}, 3.0}, {{0, 1}, 1.0}});
  CHECK(std::abs(k_tilde(f, p2, 2.5, q).value) < 1e-10);
}

TEST_CASE("k_tilde: disjoint supports equal the plain double integral") {
  const auto f = TestFunction::bump({-1.2, 0.0}, 0.8), g = TestFunction::bump({1.2, 0.3}, 0.8);
  const double alpha = 1.5;
  QuadratureConfig q;
  q.tolerance = 1e-8;
  const auto k = k_tilde(f, g, alpha, q);
  // Tensor Gauss-Legendre in all four coordinates: the integrand is smooth and bounded.
  const auto r = numerics::composite_gauss_legendre(16, 6, -0.8, 0.8);
  double s = 0.0;
  for (std::size_t a = 0; a < r.size(); ++a)
    for (std::size_t b = 0; b < r.size(); ++b) {
      const std::vector<double> x{-1.2 + r.nodes[a], r.nodes[b]};
      const double fx = f(x) * r.weights[a] * r.weights[b];
      if (fx == 0.0) continue;
      for (std::size_t c = 0; c < r.size(); ++c)
        for (std::size_t e = 0; e < r.size(); ++e) {
          const std::vector<double> y{1.2 + r.nodes[c], 0.3 + r.nodes[e]};
          const double dx = x[0] - y[0], dy = x[1] - y[1];
          s += fx * r.weights[c] * r.weights[e] * g(y) * std::pow(dx * dx + dy * dy, -0.5 * (2 + alpha));
        }
    }
  CHECK(rel(k.value, s) < 1e-6);
}

TEST_CASE("k_tilde: Gaussian alpha = 1 agrees across quadrature configurations") {
  const auto f = TestFunction::gaussian({0.0, 0.0}), g = TestFunction::gaussian({0.1, 0.0}, 0.8);
  QuadratureConfig a;
  QuadratureConfig b;
  b.radial_nodes = 24;
  b.outer_nodes = 16;
  b.outer_panels = 10;
  b.epsilon = 0.02;
  b.series_terms = 2;
  const auto ka = k_tilde(f, g, 1.0, a), kb = k_tilde(f, g, 1.0, b);
  CHECK(rel(ka.value, kb.value) < 1e-4);
  CHECK(std::abs(ka.value - kb.value) <= ka.error + kb.error + 1e-12 * std::abs(ka.value));
}

TEST_CASE("kernel equality: full Taylor against Pizzetti subtraction") {
  const auto g2 = TestFunction::gaussian({0.0, 0.0}), h2 = TestFunction::gaussian({0.0, 0.0}, 0.8);
  CHECK(kernel_equality_check(g2, h2, 1.3) < 1e-8);
  CHECK(kernel_equality_check(g2, h2, 2.5) < 1e-4);
  const auto g3 = TestFunction::gaussian({0.0, 0.0, 0.0}), h3 = TestFunction::gaussian({0.0, 0.0, 0.0}, 0.8);
  CHECK(kernel_equality_check(g3, h3, 3.0) < 1e-4);
  const auto off = TestFunction::gaussian({0.2, -0.1}, 0.9);
  CHECK(kernel_equality_check(g2, off, 3.5) < 1e-4);
}

TEST_CASE("H_0 consistency and symmetry") {
  const auto f = TestFunction::gaussian({0.0, 0.0}), g = TestFunction::gaussian({0.2, 0.1}, 0.8);
  for (double alpha : {0.5, 1.5}) {
    const auto kt = k_tilde(f, g, alpha);
    const auto kf = k_fgff(f, g, alpha);
    CHECK(rel(kf.value / kt.value, constant_C(alpha, 2)) < 1e-6);
  }
  for (double alpha : {0.5, 1.0, 2.5}) {
    const auto a = k_fgff(f, g, alpha), b = k_fgff(g, f, alpha);
    CHECK(rel(a.value, b.value) < 1e-6);
  }
}

TEST_CASE("K(f, f) is nonnegative") {
  const std::vector<TestFunction> fs{TestFunction::gaussian({0.0, 0.0}), TestFunction::gaussian({0.3, 0.0}, 0.6, -2.0)};
  for (const auto& f : fs)
    for (double alpha : {0.5, 1.0, 2.0, 2.5, 3.5}) CHECK(k_fgff(f, f, alpha).value >= 0.0);
}

TEST_CASE("Fourier ratio is the same for different Gaussian pairs") {
  const std::vector<std::pair<TestFunction, TestFunction>> pairs{
      {TestFunction::gaussian({0.0, 0.0}), TestFunction::gaussian({0.0, 0.0})},
      {TestFunction::gaussian({0.0, 0.0}, 0.7), TestFunction::gaussian({0.2, 0.0}, 1.1)},
      {TestFunction::gaussian({0.1, 0.1}, 1.2, 2.0), TestFunction::gaussian({-0.3, 0.2}, 0.9)}};
  std::vector<double> ratios;
  for (const auto& [f, g] : pairs) ratios.push_back(fourier_cross_check(f, g, 1.0).ratio);
  for (double r : ratios) CHECK(rel(r, ratios[0]) < 1e-3);
  // Recorded value: the multiplier of C(alpha, d)|x|^{-d-alpha} is (2 pi)^alpha |xi|^alpha.
  CHECK(rel(ratios[0], 2 * kPi) < 1e-6);
  const auto even = fourier_cross_check(pairs[1].first, pairs[1].second, 2.0);
  CHECK(rel(even.direct, even.fourier) < 1e-6);
}
