#include "lrising/fgff/fgff.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_hyperg.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "lrising/errors.hpp"
#include "lrising/numerics/quadrature.hpp"
#include "lrising/numerics/special.hpp"
#include "lrising/numerics/summation.hpp"
#include "lrising/testfn/jet.hpp"

namespace lrising::fgff {

using numerics::kPi;
using testfn::Family;

double omega(int d) { return numerics::sphere_area(d); }

double constant_C(double alpha, int d) {
  if (!(alpha > 0.0)) throw DomainError("constant_C: alpha must be positive");
  if (numerics::is_even_positive_integer(alpha)) throw PoleError("constant_C: Gamma(-alpha/2) has a pole at even alpha");
  return std::pow(2.0, alpha) * std::pow(kPi, -0.5 * d) * std::tgamma(0.5 * (d + alpha)) / std::tgamma(-0.5 * alpha);
}

double constant_H(int j, int d) {
  if (j < 0) throw DomainError("constant_H: j must be nonnegative");
  double denom = std::ldexp(numerics::factorial(j), j);
  for (int k = 0; k < j; ++k) denom *= d + 2 * k;
  return omega(d) / denom;
}

FgffConstants constants(double alpha, int d) {
  FgffConstants c;
  c.d = d;
  c.alpha = alpha;
  c.omega_d = omega(d);
  c.c_alpha_d = numerics::is_even_positive_integer(alpha) ? std::numeric_limits<double>::quiet_NaN() : constant_C(alpha, d);
  for (int j = 0; j <= testfn::floor2(alpha) / 2; ++j) c.H.push_back(constant_H(j, d));
  c.hurst = -0.5 * d - 0.5 * alpha;
  return c;
}

double spherical_moment(const MultiIndex& gamma, int d) {
  if (gamma.dim() != d) throw DomainError("spherical_moment: dimension mismatch");
  if (gamma.any_odd()) return 0.0;
  double num = 1.0, den = 1.0;
  for (int i = 0; i < d; ++i) num *= numerics::double_factorial(gamma[i] - 1);
  for (int k = 0; k < gamma.order() / 2; ++k) den *= d + 2 * k;
  return num / den;
}

PizzettiReduction pizzetti_reduce(const TestFunction& g, int j, std::span<const double> x) {
  if (j < 0) throw DomainError("pizzetti_reduce: j must be nonnegative");
  const int d = g.dim();
  const auto jet = g.jet(x, 2 * j);
  numerics::CompensatedSum lhs;
  for (const auto& gamma : testfn::multi_indices(d, 2 * j)) {
    if (gamma.any_odd()) continue;
    double w = 1.0;
    for (int i = 0; i < d; ++i) w *= numerics::double_factorial(gamma[i] - 1);
    lhs.add(jet.coeff(gamma) * w);  // d^gamma g / gamma! is the jet coefficient
  }
  PizzettiReduction out;
  out.multi_index_side = lhs.value();
  out.laplacian_side = g.laplacian_power(j, x) / (std::ldexp(numerics::factorial(j), j));
  out.difference = out.multi_index_side - out.laplacian_side;
  return out;
}

namespace {

struct Triple {
  std::array<double, 3> v{};  // inner cutoffs eps, eps/2, eps/4
  double magnitude = 0.0;
  Triple& operator+=(const Triple& o) {
    for (int i = 0; i < 3; ++i) v[static_cast<std::size_t>(i)] += o.v[static_cast<std::size_t>(i)];
    magnitude += o.magnitude;
    return *this;
  }
  Triple scaled(double w) const {
    Triple t;
    for (int i = 0; i < 3; ++i) t.v[static_cast<std::size_t>(i)] = w * v[static_cast<std::size_t>(i)];
    t.magnitude = std::abs(w) * magnitude;
    return t;
  }
};

class InnerIntegral {
 public:
  InnerIntegral(const TestFunction& g, double alpha, const QuadratureConfig& q, Subtraction sub)
      : g_(g), alpha_(alpha), q_(q), sub_(sub), d_(g.dim()) {
    if (d_ != 2 && d_ != 3) throw CapabilityError("fgff quadrature is implemented for d = 2 and d = 3");
    m_ = testfn::floor2(alpha);
    if (m_ > g.max_derivative_order()) throw CapabilityError("g lacks derivatives of order floor2(alpha)");
    terms_ = std::max(0, std::min(q.series_terms, (g.max_derivative_order() - m_) / 2));
    order_ = m_ + 2 * terms_;
    scale_ = (g.family() == Family::Polynomial) ? 1.0 : g.scale();
    eps_ = q.epsilon * scale_;
    compact_ = g.has_finite_support();
    if (!compact_ && !(q.r_max > 0.0)) throw DomainError("k_tilde: r_max must be set when g has no finite support");
    radial_ = q.radial_reduction && g.is_radial();
    if (!radial_) sphere_ = numerics::sphere_rule(d_, std::max(q.angular_order, order_ / 2 + 2));
    angular_ = numerics::gauss_legendre(q.angular_order, -1.0, 1.0);
  }

  // Omega_d int_0^inf r^{-1-alpha} (M(x, r) - P(x, r)) dr for the three inner cutoffs.
  Triple operator()(std::span<const double> x) const {
    const auto coeffs = subtraction_coefficients(x);
    const double a = distance_to_center(x);
    const double r_end = compact_ ? a + g_.support_radius() : q_.r_max;
    // Near the edge of a bump the Taylor series of g converges only on a radius of order
    // (R - a)^2 / R, so the analytic piece must shrink with it.
    double eps = eps_;
    if (g_.family() == Family::CompactBump || g_.family() == Family::PolynomialTimesBump) {
      const double R = g_.support_radius();
      if (a < R) eps = std::min(eps_, 0.1 * (R - a) * (R - a) / R);
    }

    auto analytic = [&](double e) {
      double s = 0.0;
      for (int k = m_ + 2; k <= order_; k += 2) s += coeffs[static_cast<std::size_t>(k)] * std::pow(e, k - alpha_) / (k - alpha_);
      return s;
    };
    auto poly = [&](double r) {
      double p = 0.0;
      for (int k = m_; k >= 0; --k) p = p * r + coeffs[static_cast<std::size_t>(k)];
      return p;
    };

    std::vector<double> edges{eps / 4, eps / 2, eps};
    std::vector<double> breaks;
    if (g_.is_radial() && compact_ && g_.family() == Family::CompactBump) {
      breaks = {a, std::abs(a - g_.support_radius()), a + g_.support_radius()};
    } else if (g_.is_radial()) {
      breaks = {a};
    }
    const double h_max = scale_;
    double e = eps;
    while (e < r_end) {
      e = std::min({2.0 * e, e + h_max, r_end});
      edges.push_back(e);
    }
    for (double b : breaks)
      if (b > eps && b < r_end) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(), [](double u, double v) { return std::abs(u - v) < 1e-14 * (1 + v); }),
                edges.end());

    const auto rule = numerics::gauss_legendre(q_.radial_nodes, 0.0, 1.0);
    numerics::CompensatedSum low1, low2, rest;
    double mag = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
      const double lo = edges[i], hi = edges[i + 1];
      numerics::CompensatedSum shell;
      for (std::size_t k = 0; k < rule.size(); ++k) {
        const double r = lo + (hi - lo) * rule.nodes[k];
        const double w = (hi - lo) * rule.weights[k] * std::pow(r, -1.0 - alpha_);
        const double M = spherical_mean(x, a, r);
        const double P = poly(r);
        shell.add(w * (M - P));
        mag += w * (std::abs(M) + std::abs(P));
      }
      if (i == 0)
        low2 = shell;
      else if (i == 1)
        low1 = shell;
      else
        rest.merge(shell);
    }
    double tail = 0.0;
    if (compact_)
      for (int k = 0; k <= m_; ++k) tail -= coeffs[static_cast<std::size_t>(k)] * std::pow(r_end, k - alpha_) / (alpha_ - k);

    const double om = omega(d_);
    Triple t;
    const double base = rest.value() + tail;
    t.v[0] = om * (analytic(eps) + base);
    t.v[1] = om * (analytic(eps / 2) + low1.value() + base);
    t.v[2] = om * (analytic(eps / 4) + low2.value() + low1.value() + base);
    t.magnitude = om * (mag + std::abs(tail) + std::abs(analytic(eps)));
    return t;
  }

  double richardson_exponent() const { return order_ + 2 - alpha_; }

 private:
  double distance_to_center(std::span<const double> x) const {
    double a2 = 0.0;
    for (int i = 0; i < d_; ++i) {
      const double t = x[static_cast<std::size_t>(i)] - g_.center()[static_cast<std::size_t>(i)];
      a2 += t * t;
    }
    return std::sqrt(a2);
  }

  // Coefficients c_k of r^k, k = 0..order_, of the spherical mean of the Taylor expansion of g at x.
  std::vector<double> subtraction_coefficients(std::span<const double> x) const {
    std::vector<double> c(static_cast<std::size_t>(order_) + 1, 0.0);
    const auto jet = g_.jet(x, order_);
    if (sub_ == Subtraction::Pizzetti) {
      for (int j = 0; 2 * j <= order_; ++j) {
        // Delta^j g = sum_{|beta| = j} j!/beta! d^{2 beta} g
        double lap = 0.0;
        for (const auto& beta : testfn::multi_indices(d_, j)) {
          std::vector<int> twice(beta.gamma);
          for (auto& v : twice) v *= 2;
          lap += numerics::factorial(j) / beta.factorial() * jet.derivative(MultiIndex(twice));
        }
        c[static_cast<std::size_t>(2 * j)] = constant_H(j, d_) / omega(d_) * lap;
      }
      return c;
    }
    // Term-by-term sphere average of the Taylor polynomial; odd orders average to zero.
    for (std::size_t mono = 0; mono < jet.space->size(); ++mono) {
      const auto& gamma = jet.space->monomial(mono);
      c[static_cast<std::size_t>(gamma.order())] += jet.c[mono] * spherical_moment(gamma, d_);
    }
    return c;
  }

  double spherical_mean(std::span<const double> x, double a, double r) const {
    if (radial_) {
      if (g_.family() == Family::GaussianEnvelope) {
        const double s2 = scale_ * scale_;
        const double b = 2.0 * kPi * a * r / s2;
        const double gauss = g_.amplitude() * std::exp(-kPi * (a - r) * (a - r) / s2);
        if (d_ == 2) return gauss * gsl_sf_bessel_I0_scaled(b);
        return gauss * (b < 1e-8 ? 1.0 - b : -std::expm1(-2.0 * b) / (2.0 * b));
      }
      return bump_mean(a, r);
    }
    double s = 0.0;
    std::vector<double> y(static_cast<std::size_t>(d_));
    for (std::size_t p = 0; p < sphere_.size(); ++p) {
      const double* w = sphere_.point(p);
      for (int i = 0; i < d_; ++i) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + r * w[i];
      s += sphere_.weights[p] * g_(y);
    }
    return s;
  }

  // Mean of the radial bump over the sphere of radius r about a point at distance a from its centre,
  // as a 1D integral in u = cos(theta), cut where the sphere leaves the support.
  double bump_mean(double a, double r) const {
    const double R = g_.support_radius();
    if (a < 1e-14 * R) return g_.radial_profile(r);
    const double ustar = (R * R - a * a - r * r) / (2.0 * a * r);
    if (ustar <= -1.0) return 0.0;
    auto h = [&](double u) { return g_.radial_profile(std::sqrt(std::max(0.0, a * a + r * r + 2.0 * a * r * u))); };
    double s = 0.0;
    if (d_ == 3) {
      const double hi = std::min(1.0, ustar);
      for (std::size_t k = 0; k < angular_.size(); ++k) {
        const double u = -1.0 + (hi + 1.0) * 0.5 * (angular_.nodes[k] + 1.0);
        s += 0.5 * (hi + 1.0) * 0.5 * angular_.weights[k] * h(u);
      }
      return 0.5 * s;
    }
    const double tlo = ustar >= 1.0 ? 0.0 : std::acos(ustar);
    for (std::size_t k = 0; k < angular_.size(); ++k) {
      const double t = tlo + (kPi - tlo) * 0.5 * (angular_.nodes[k] + 1.0);
      s += (kPi - tlo) * 0.5 * angular_.weights[k] * h(std::cos(t));
    }
    return s / kPi;
  }

  const TestFunction& g_;
  double alpha_;
  QuadratureConfig q_;
  Subtraction sub_;
  int d_;
  int m_ = 0, terms_ = 0, order_ = 0;
  double scale_ = 1.0, eps_ = 0.0;
  bool compact_ = true, radial_ = false;
  numerics::SphereRule sphere_;
  numerics::Rule1D angular_;
};

bool same_center(const TestFunction& f, const TestFunction& g) {
  for (int i = 0; i < f.dim(); ++i)
    if (std::abs(f.center()[static_cast<std::size_t>(i)] - g.center()[static_cast<std::size_t>(i)]) > 0.0) return false;
  return true;
}

// int f(x) inner(x) dx over the support of f.
template <class Inner>
Triple outer_integral(const TestFunction& f, const TestFunction& g, const QuadratureConfig& q, Inner&& inner) {
  const int d = f.dim();
  if (!f.has_finite_support()) throw CapabilityError("fgff quadrature: f must have finite support");
  if (q.radial_reduction && f.is_radial() && g.is_radial() && same_center(f, g)) {
    const auto rule = numerics::composite_gauss_legendre(q.outer_nodes, q.outer_panels, 0.0, f.support_radius());
    std::vector<Triple> parts(rule.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < rule.size(); ++i) {
      std::vector<double> x(f.center());
      x[0] += rule.nodes[i];
      const double w = rule.weights[i] * omega(d) * std::pow(rule.nodes[i], d - 1) * f.radial_profile(rule.nodes[i]);
      parts[i] = inner(std::span<const double>(x)).scaled(w);
    }
    Triple t;
    for (const auto& p : parts) t += p;
    return t;
  }
  std::vector<numerics::Rule1D> rules;
  for (int i = 0; i < d; ++i) {
    const auto [lo, hi] = f.axis_support(i);
    rules.push_back(numerics::composite_gauss_legendre(q.outer_nodes, q.outer_panels, lo, hi));
  }
  std::int64_t total = 1;
  for (const auto& r : rules) total *= static_cast<std::int64_t>(r.size());
  std::vector<Triple> parts(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::vector<double> x(static_cast<std::size_t>(d));
    double w = 1.0;
    std::int64_t r = idx;
    for (int k = d - 1; k >= 0; --k) {
      const auto& rule = rules[static_cast<std::size_t>(k)];
      const auto n = static_cast<std::int64_t>(rule.size());
      x[static_cast<std::size_t>(k)] = rule.nodes[static_cast<std::size_t>(r % n)];
      w *= rule.weights[static_cast<std::size_t>(r % n)];
      r /= n;
    }
    const double fv = f(x);
    if (fv == 0.0 || w == 0.0) continue;
    parts[static_cast<std::size_t>(idx)] = inner(std::span<const double>(x)).scaled(w * fv);
  }
  Triple t;
  for (const auto& p : parts) t += p;
  return t;
}

QuadratureConfig refined(const QuadratureConfig& q, int level) {
  QuadratureConfig r = q;
  r.radial_nodes = q.radial_nodes + 8 * level;
  r.angular_order = q.angular_order + 8 * level;
  r.outer_nodes = q.outer_nodes + 2 * level;
  r.outer_panels = q.outer_panels + q.outer_panels * level / 2;
  return r;
}

struct Level {
  double value = 0.0;
  double spread = 0.0;
  double magnitude = 0.0;
};

Level evaluate_level(const TestFunction& f, const TestFunction& g, double alpha, const QuadratureConfig& q,
                     Subtraction sub) {
  const InnerIntegral inner(g, alpha, q, sub);
  const Triple t = outer_integral(f, g, q, inner);
  const double p = inner.richardson_exponent();
  const double v = t.v[2] + (t.v[2] - t.v[1]) / (std::pow(2.0, p) - 1.0);
  Level out;
  out.value = v;
  out.spread = std::max({std::abs(t.v[0] - v), std::abs(t.v[1] - v), std::abs(t.v[2] - v)});
  out.magnitude = t.magnitude;
  return out;
}

template <class Eval>
KernelValue refine_until(const QuadratureConfig& q, Eval&& eval, const std::string& what) {
  Level prev = eval(refined(q, 0));
  std::ostringstream diag;
  diag << "level 0: value=" << prev.value << " spread=" << prev.spread << "\n";
  for (int level = 1; level <= q.max_refinements; ++level) {
    const Level cur = eval(refined(q, level));
    const double change = std::abs(cur.value - prev.value);
    const double err = change + cur.spread;
    diag << "level " << level << ": value=" << cur.value << " spread=" << cur.spread << " change=" << change << "\n";
    const double scale = std::max(std::abs(cur.value), 1e-10 * cur.magnitude);
    if (err <= q.tolerance * scale) return {cur.value, err, cur.spread, change, level};
    prev = cur;
  }
  throw AccuracyError(what + ": tolerance not met", diag.str());
}

void check_pair(const TestFunction& f, const TestFunction& g, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
  if (f.dim() != g.dim()) throw DomainError("f and g must have the same dimension");
}

}  // namespace

KernelValue k_tilde(const TestFunction& f, const TestFunction& g, double alpha, const QuadratureConfig& quad,
                    Subtraction sub) {
  check_pair(f, g, alpha);
  if (numerics::is_even_positive_integer(alpha))
    throw DivergenceError("k_tilde: the remainder integral diverges logarithmically at even alpha");
  return refine_until(quad, [&](const QuadratureConfig& q) { return evaluate_level(f, g, alpha, q, sub); }, "k_tilde");
}

KernelValue k_fgff(const TestFunction& f, const TestFunction& g, double alpha, const QuadratureConfig& quad) {
  check_pair(f, g, alpha);
  if (!numerics::is_even_positive_integer(alpha)) {
    const double C = constant_C(alpha, f.dim());
    auto kv = k_tilde(f, g, alpha, quad, Subtraction::Pizzetti);
    kv.value *= C;
    kv.error *= std::abs(C);
    kv.epsilon_spread *= std::abs(C);
    kv.refinement_change *= std::abs(C);
    return kv;
  }
  const int j = static_cast<int>(std::lround(alpha / 2));
  const double pref = std::pow(4.0 * kPi * kPi, -0.5 * alpha) * ((j % 2) ? -1.0 : 1.0);
  auto kv = laplacian_pairing(f, g, j, quad);
  kv.value *= pref;
  kv.error *= std::abs(pref);
  kv.refinement_change *= std::abs(pref);
  return kv;
}

KernelValue laplacian_pairing(const TestFunction& f, const TestFunction& g, int j, const QuadratureConfig& quad) {
  if (j < 0) throw DomainError("laplacian_pairing: j must be >= 0");
  if (f.dim() != g.dim()) throw DomainError("laplacian_pairing: dimension mismatch");
  return refine_until(
      quad,
      [&](const QuadratureConfig& q) {
        const Triple t = outer_integral(f, g, q, [&](std::span<const double> x) {
          Triple one;
          const double v = g.laplacian_power(j, x);
          one.v = {v, v, v};
          one.magnitude = std::abs(v);
          return one;
        });
        return Level{t.v[0], 0.0, t.magnitude};
      },
      "laplacian_pairing");
}

double kernel_equality_check(const TestFunction& f, const TestFunction& g, double alpha, const QuadratureConfig& quad) {
  const auto full = k_tilde(f, g, alpha, quad, Subtraction::FullTaylor);
  const auto piz = k_tilde(f, g, alpha, quad, Subtraction::Pizzetti);
  return std::abs(full.value - piz.value) / std::max(std::abs(full.value), 1e-300);
}

double fourier_side(const TestFunction& f, const TestFunction& g, double alpha) {
  if (f.family() != Family::GaussianEnvelope || g.family() != Family::GaussianEnvelope)
    throw CapabilityError("fourier_side: closed-form transforms exist only for Gaussian envelopes");
  if (!(alpha >= 0.0)) throw DomainError("fourier_side: alpha must be nonnegative");
  const int d = f.dim();
  const double S = f.scale() * f.scale() + g.scale() * g.scale();
  double dc2 = 0.0;
  for (int i = 0; i < d; ++i) {
    const double t = f.center()[static_cast<std::size_t>(i)] - g.center()[static_cast<std::size_t>(i)];
    dc2 += t * t;
  }
  const double a = 0.5 * (alpha + d);
  const double radial = omega(d) * std::tgamma(a) / (2.0 * std::pow(kPi * S, a));
  double hyp = 1.0;
  if (dc2 > 0.0) {
    gsl_sf_result res;
    const auto old = gsl_set_error_handler_off();
    const int status = gsl_sf_hyperg_1F1_e(a, 0.5 * d, -kPi * dc2 / S, &res);
    gsl_set_error_handler(old);
    if (status != GSL_SUCCESS) throw AccuracyError("fourier_side: 1F1 evaluation failed", gsl_strerror(status));
    hyp = res.val;
  }
  return f.amplitude() * g.amplitude() * std::pow(f.scale() * g.scale(), d) * radial * hyp;
}

FourierCheck fourier_cross_check(const TestFunction& f, const TestFunction& g, double alpha,
                                 const QuadratureConfig& quad) {
  FourierCheck out;
  out.fourier = fourier_side(f, g, alpha);
  const auto k = k_fgff(f, g, alpha, quad);
  out.direct = k.value;
  out.direct_error = k.error;
  out.ratio = out.direct / out.fourier;
  return out;
}

}  // namespace lrising::fgff
