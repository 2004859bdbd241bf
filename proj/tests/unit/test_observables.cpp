#include <doctest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "lrising/errors.hpp"
#include "lrising/model/susceptibility.hpp"
#include "lrising/numerics/epstein.hpp"
#include "lrising/numerics/rng.hpp"
#include "lrising/numerics/summation.hpp"
#include "lrising/observables/grid.hpp"
#include "lrising/observables/observables.hpp"

using namespace lrising;
using namespace lrising::observables;
using model::TwoPointModel;
using numerics::CounterRng;

namespace {

TwoPointModel synth(int d, double alpha, double A = 1.0, double c = 0.0) {
  return TwoPointModel::synthetic({d, A, d + alpha, c, 1.0});
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("smeared_value examples") {
  const int d = 2, L = 4;
  const auto box = TestFunction::box_indicator({0.0, 0.0});
  const auto indep = TwoPointModel::independent(d);
  const double sigma = model::sigma_L(indep, L);
  CHECK(sigma == 81.0);
  model::SpinConfiguration up(model::RectBox::centered_cube(d, L));
  CHECK(smeared_value({box, L, sigma}, up) == doctest::Approx(2.0 * 9.0).epsilon(1e-14));

  CounterRng rng(5);
  model::SpinConfiguration s(model::RectBox::centered_cube(d, 2 * L));
  for (auto& v : s.spins) v = rng.below(2) ? 1 : -1;
  auto flipped = s;
  for (auto& v : flipped.spins) v = static_cast<std::int8_t>(-v);
  const auto f = TestFunction::bump({0.1, -0.2}, 1.3);
  const double t = smeared_value({f, L, 7.0}, s);
  CHECK(smeared_value({f, L, 7.0}, flipped) == doctest::Approx(-t).epsilon(1e-15));

  double brute = 0.0;
  for (int x = -2 * L; x <= 2 * L; ++x)
    for (int y = -2 * L; y <= 2 * L; ++y) {
      const std::vector<double> p{x / 4.0, y / 4.0};
      brute += f(p) * s.at(std::vector<int>{x, y});
    }
  CHECK(t == doctest::Approx(2.0 / std::sqrt(7.0) * brute).epsilon(1e-13));

  model::SpinConfiguration small(model::RectBox::centered_cube(d, 2));
  CHECK_THROWS_AS(smeared_value({f, L, 7.0}, small), CoverageError);
}

TEST_CASE("cross-correlation: FFT equals direct") {
  CounterRng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = gen::int_in(rng, 1, 3);
    auto random_grid = [&] {
      std::vector<int> ext(static_cast<std::size_t>(d));
      model::Point org(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        ext[static_cast<std::size_t>(i)] = gen::int_in(rng, 1, 7);
        org[static_cast<std::size_t>(i)] = gen::int_in(rng, -5, 5);
      }
      DenseGrid g{model::RectBox(ext, org), {}};
      for (std::int64_t i = 0; i < g.box.size(); ++i) g.values.push_back(gen::real_in(rng, -1.0, 1.0));
      return g;
    };
    const auto a = random_grid(), b = random_grid();
    const auto c1 = cross_correlate_fft(a, b), c2 = cross_correlate_direct(a, b);
    REQUIRE(c1.box.extents == c2.box.extents);
    REQUIRE(c1.box.origin == c2.box.origin);
    for (std::size_t i = 0; i < c1.values.size(); ++i) CHECK(std::abs(c1.values[i] - c2.values[i]) < 1e-13);
  }
}

TEST_CASE("covariance of the box indicator equals 2^d") {
  // The smeared observable is normalized so that <T^2> = 2^d / Sigma_L * Sigma_L = int f^2.
  const auto box2 = TestFunction::box_indicator({0.0, 0.0});
  const auto box3 = TestFunction::box_indicator({0.0, 0.0, 0.0});
  const std::vector<TwoPointModel> m2{TwoPointModel::independent(2), synth(2, 1.0), synth(2, 0.5, 3.0, 0.5)};
  for (const auto& m : m2)
    for (int L : {1, 2, 7, 16, 33}) CHECK(rel(covariance(box2, box2, L, m), 4.0) < 1e-12);
  const std::vector<TwoPointModel> m3{TwoPointModel::independent(3), synth(3, 1.0)};
  for (const auto& m : m3)
    for (int L : {1, 3, 8}) CHECK(rel(covariance(box3, box3, L, m), 8.0) < 1e-12);
}

TEST_CASE("covariance examples at beta = 0") {
  const auto indep = TwoPointModel::independent(2);
  const auto g = TestFunction::gaussian({0.0, 0.0});
  // At beta = 0 the value is 2^d / |Lambda_L| sum_x f(x/L)^2 = (2L / (2L + 1))^2 * 1/2 up to
  // exponentially small Riemann-sum error, so the offset from 1/2 is about 1/(2L).
  const double c64 = covariance(g, g, 64, indep);
  CHECK(c64 == doctest::Approx(std::pow(128.0 / 129.0, 2) * 0.5).epsilon(1e-12));
  CHECK(std::abs(c64 - 0.5) < 1e-2);
  CHECK(l2_inner_product(g, g) == doctest::Approx(0.5).epsilon(1e-12));
  const auto f1 = TestFunction::bump({-1.5, 0.0}), f2 = TestFunction::bump({1.5, 0.0});
  CHECK(covariance(f1, f2, 8, indep) == 0.0);
  CHECK(covariance(f1, f2, 8, indep, Path::Direct) == 0.0);
}

TEST_CASE("property: covariance paths agree, symmetric, bilinear") {
  CounterRng rng(123);
  const auto model = synth(2, 1.0, 0.7);
  for (int trial = 0; trial < 6; ++trial) {
    const int L = gen::int_in(rng, 2, 32);
    const auto f = TestFunction::gaussian({gen::real_in(rng, -0.3, 0.3), 0.1}, gen::real_in(rng, 0.6, 1.2));
    const auto g = TestFunction::gaussian({0.2, gen::real_in(rng, -0.3, 0.3)}, gen::real_in(rng, 0.6, 1.2), 2.0);
    const double sep = covariance(f, g, L, model, Path::Separable);
    const double fft = covariance(f, g, L, model, Path::Fourier);
    CHECK(rel(fft, sep) < 1e-9);
    if (L <= 12) CHECK(rel(covariance(f, g, L, model, Path::Direct), sep) < 1e-9);
    CHECK(rel(covariance(g, f, L, model), sep) < 1e-12);
  }
  for (int L : {4, 16, 32}) {
    const auto b = TestFunction::bump({0.1, 0.0}, 1.1);
    const auto pb = TestFunction::poly_bump({{{1, 1}, 1.0}, {{0, 0}, 0.3}}, {0.0, 0.2}, 0.9);
    const double fft = covariance(b, pb, L, model, Path::Fourier);
    CHECK(rel(covariance(b, pb, L, model, Path::Direct), fft) < 1e-9);
    // Bilinearity through the amplitude.
    const auto b3 = TestFunction::bump({0.1, 0.0}, 1.1, 3.0);
    CHECK(rel(covariance(b3, pb, L, model), 3.0 * fft) < 1e-12);
  }
}

TEST_CASE("property: 3x3 Gram matrices are positive semidefinite") {
  CounterRng rng(9);
  const auto model = synth(2, 1.5, 0.5);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<TestFunction> fs;
    for (int k = 0; k < 3; ++k) fs.push_back(TestFunction::gaussian(gen::point(rng, 2, 0.8), gen::real_in(rng, 0.4, 1.0)));
    double G[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) G[i][j] = covariance(fs[static_cast<std::size_t>(i)], fs[static_cast<std::size_t>(j)], 8, model);
    // Sylvester: leading minors of a PSD matrix are nonnegative, and so are all eigenvalues;
    // check the characteristic polynomial coefficients instead of computing roots.
    const double tr = G[0][0] + G[1][1] + G[2][2];
    const double m2 = G[0][0] * G[1][1] - G[0][1] * G[1][0] + G[0][0] * G[2][2] - G[0][2] * G[2][0] +
                      G[1][1] * G[2][2] - G[1][2] * G[2][1];
    const double det = G[0][0] * (G[1][1] * G[2][2] - G[1][2] * G[2][1]) -
                       G[0][1] * (G[1][0] * G[2][2] - G[1][2] * G[2][0]) +
                       G[0][2] * (G[1][0] * G[2][1] - G[1][1] * G[2][0]);
    CHECK(tr >= -1e-10);
    CHECK(m2 >= -1e-10);
    CHECK(det >= -1e-10);
  }
}

TEST_CASE("kernel_moment examples") {
  const auto m = synth(2, 2.5);
  CHECK(kernel_moment(m, MultiIndex{1, 2}, 50).partial == 0.0);
  CHECK(kernel_moment(m, MultiIndex{0, 0}, 37).partial ==
        doctest::Approx(model::susceptibility_partial(m, 37)).epsilon(1e-13));
  // |gamma| = 2 is not below exponent - d = 1.5 at alpha = 1.5.
  CHECK_THROWS_AS(kernel_moment(synth(2, 1.5), MultiIndex{2, 0}, 1000), DivergenceError);

  // alpha = 2.5: brute force at R = 1000 and the exact Epstein value for the remainder.
  const int R = 1000;
  const auto km = kernel_moment(m, MultiIndex{2, 0}, R);
  double brute = 0.0;
  for (int x = 1; x <= R; ++x) {
    numerics::CompensatedSum row;
    for (int y = -R; y <= R; ++y) row.add(static_cast<double>(x) * x * m(std::vector<int>{x, y}));
    brute += 2.0 * row.value();
  }
  CHECK(rel(km.partial, brute) < 1e-10);
  const double exact = numerics::epstein_zeta(2, 4.5 - 2.0) / 2.0;
  const double rest = exact - km.partial;
  CHECK(std::abs(rest) <= km.tail_bound);
  CHECK(rel(km.tail_estimate, rest) < 1e-3);
  CHECK(rel(full_kernel_moment(m, MultiIndex{0, 2}, R).value, exact) < 1e-12);
}

TEST_CASE("kernel_moment: fourth moments converge to the larger-R value") {
  const auto m = synth(2, 4.5);
  const auto small = kernel_moment(m, MultiIndex{2, 2}, 200);
  const auto large = kernel_moment(m, MultiIndex{2, 2}, 3000);
  CHECK(std::abs(large.value() - small.partial) <= small.tail_bound);
  CHECK(rel(small.value(), large.value()) < 1e-5);
}

TEST_CASE("renormalized pair at beta = 0 vanishes") {
  const auto indep = TwoPointModel::independent(2);
  const auto f = TestFunction::gaussian({0.1, 0.0}), g = TestFunction::gaussian({0.0, 0.2}, 0.8);
  for (double alpha : {0.5, 1.0, 2.0, 2.5, 3.0})
    for (int L : {2, 8, 32}) CHECK(std::abs(renormalized_pair_expectation({f, g, alpha, L, 0}, indep).value) < 1e-13);
  const auto seq = scaling_sequence(f, g, 1.0, indep, {4, 8, 16});
  for (const auto& r : seq.rows) CHECK(std::abs(r.rescaled) < 1e-12);
}

TEST_CASE("renormalized pair: fast path equals the direct double sum") {
  const auto model = synth(2, 1.0);
  const auto f = TestFunction::bump({0.0, 0.0}), g = TestFunction::bump({0.2, 0.1}, 0.9);
  const auto fast = renormalized_pair_expectation({f, g, 1.0, 64, 0}, model);
  const auto direct = renormalized_pair_expectation({f, g, 1.0, 64, 0}, model, Path::Direct);
  CHECK(rel(fast.value, direct.value) < 1e-9);

  const auto m3 = synth(2, 2.5, 0.6);
  const auto fg = TestFunction::gaussian({0.0, 0.0}, 0.7), gg = TestFunction::gaussian({0.1, 0.0}, 0.8);
  for (int L : {4, 8}) {
    const auto a = renormalized_pair_expectation({fg, gg, 2.5, L, 0}, m3, Path::Separable);
    const auto b = renormalized_pair_expectation({fg, gg, 2.5, L, 0}, m3, Path::Fourier);
    const auto c = renormalized_pair_expectation({fg, gg, 2.5, L, 0}, m3, Path::Direct);
    CHECK(rel(b.value, a.value) < 1e-9);
    CHECK(rel(c.value, a.value) < 1e-9);
  }
}

TEST_CASE("property: polynomials of degree <= floor2(alpha) are annihilated up to the tail bound") {
  CounterRng rng(31);
  const auto f = TestFunction::bump({0.0, 0.0}, 0.8);
  for (double alpha : {0.5, 1.5, 2.5, 3.5}) {
    const auto model = synth(2, alpha, 0.8);
    const int m = testfn::floor2(alpha);
    std::vector<testfn::Monomial> terms;
    for (int k = 0; k < 4; ++k) {
      std::vector<int> e(2);
      const int deg = gen::int_in(rng, 0, m);
      for (int j = 0; j < deg; ++j) e[static_cast<std::size_t>(gen::int_in(rng, 0, 1))]++;
      terms.push_back({e, gen::real_in(rng, -1.0, 1.0)});
    }
    const auto p = TestFunction::polynomial(2, terms);
    for (int L : {4, 8}) {
      const auto r = renormalized_pair_expectation({f, p, alpha, L, 3 * L}, model);
      CHECK(std::abs(r.value) <= r.tail_bound);
      CHECK(std::isfinite(r.tail_bound));
    }
  }
}

TEST_CASE("scaling_sequence rejects L = 1 for even alpha") {
  const auto f = TestFunction::gaussian({0.0, 0.0});
  CHECK_THROWS_AS(scaling_sequence(f, f, 2.0, synth(2, 2.0), {1, 2, 4}), DomainError);
  CHECK_THROWS_AS(scaling_sequence(f, f, 1.0, synth(2, 1.0), {4, 2}), DomainError);
}
