#include "lrising/mc/enumerate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "lrising/errors.hpp"
#include "lrising/mc/sampler.hpp"

namespace lrising::mc {
namespace {

// Exact local fields are recomputed this often so Gray-code updates cannot drift.
constexpr std::uint64_t kResync = 1024;

void walsh_hadamard(std::vector<double>& a) {
  const std::size_t n = a.size();
  for (std::size_t len = 1; len < n; len <<= 1)
    for (std::size_t i = 0; i < n; i += len << 1)
      for (std::size_t j = i; j < i + len; ++j) {
        const double u = a[j], v = a[j + len];
        a[j] = u + v;
        a[j + len] = u - v;
      }
}

std::uint32_t bit(std::int64_t site) { return std::uint32_t{1} << static_cast<unsigned>(site); }

}  // namespace

double EnumerationResult::correlator(std::uint32_t mask) const {
  if (std::popcount(mask) % 2 != 0) return 0.0;
  return even[mask >> 1];
}

double EnumerationResult::two_point(std::int64_t x, std::int64_t y) const { return correlator(bit(x) ^ bit(y)); }

double EnumerationResult::four_point(std::int64_t x, std::int64_t y, std::int64_t z, std::int64_t t) const {
  return correlator(bit(x) ^ bit(y) ^ bit(z) ^ bit(t));
}

std::vector<double> EnumerationResult::two_point_table() const {
  std::vector<double> t(static_cast<std::size_t>(sites) * static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i)
    for (int j = 0; j < sites; ++j) t[static_cast<std::size_t>(i * sites + j)] = two_point(i, j);
  return t;
}

EnumerationResult exact_enumerate(const model::InteractionSpec& spec, double beta, const model::RectBox& box) {
  if (!(beta >= 0.0)) throw DomainError("exact_enumerate: beta must be >= 0");
  const std::int64_t n = box.size();
  if (n > kMaxEnumerationSites)
    throw CapacityError("exact_enumerate: " + std::to_string(n) + " sites exceeds the limit of " +
                        std::to_string(kMaxEnumerationSites));
  if (n < 1) throw DomainError("exact_enumerate: empty box");
  const CouplingTable table(spec, box);
  const auto ns = static_cast<std::size_t>(n);

  std::vector<double> J(ns * ns);
  double e0 = 0.0;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < ns; ++j) {
      J[i * ns + j] = table.between(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j));
      if (j > i) e0 -= J[i * ns + j];
    }

  // Site 0 is pinned to +1; bit b of the state is site b + 1, set meaning spin -1.
  const unsigned free_bits = static_cast<unsigned>(n - 1);
  const std::uint64_t states = std::uint64_t{1} << free_bits;
  std::vector<double> w(static_cast<std::size_t>(states));
  std::vector<int> s(ns, 1);
  std::vector<double> h(ns);
  auto resync = [&](double& excess) {
    excess = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < ns; ++j) acc += J[i * ns + j] * s[j];
      h[i] = acc;
      excess -= 0.5 * s[i] * acc;
    }
    excess -= e0;
  };

  double excess = 0.0;  // E(s) - E(all plus) >= 0
  std::uint64_t gray = 0;
  for (std::uint64_t t = 0; t < states; ++t) {
    if (t > 0) {
      const auto b = static_cast<std::size_t>(std::countr_zero(t));
      gray ^= std::uint64_t{1} << b;
      const std::size_t k = b + 1;
      excess += 2.0 * s[k] * h[k];
      s[k] = -s[k];
      for (std::size_t i = 0; i < ns; ++i) h[i] += 2.0 * s[k] * J[i * ns + k];
      if (t % kResync == 0) resync(excess);
    } else {
      resync(excess);
    }
    w[static_cast<std::size_t>(gray)] = std::exp(-beta * excess);
  }

  walsh_hadamard(w);
  EnumerationResult r;
  r.box = box;
  r.beta = beta;
  r.sites = static_cast<int>(n);
  const double z_half = w[0];
  r.log_z = std::log(2.0 * z_half) - beta * e0;
  for (auto& v : w) v /= z_half;
  w[0] = 1.0;
  r.even = std::move(w);
  return r;
}

double ursell_u4(const EnumerationResult& e, std::int64_t x, std::int64_t y, std::int64_t z, std::int64_t t) {
  for (auto v : {x, y, z, t})
    if (v < 0 || v >= e.sites) throw DomainError("ursell_u4: site index outside the box");
  return e.four_point(x, y, z, t) - e.two_point(x, y) * e.two_point(z, t) - e.two_point(x, z) * e.two_point(y, t) -
         e.two_point(x, t) * e.two_point(y, z);
}

TreeBoundReport tree_bound_check(const EnumerationResult& e) {
  const int n = e.sites;
  const auto G = e.two_point_table();
  auto g = [&](int a, int b) { return G[static_cast<std::size_t>(a * n + b)]; };
  TreeBoundReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  rep.max_u4 = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k)
        for (int l = k; l < n; ++l) {
          const double u4 = ursell_u4(e, i, j, k, l);
          double tree = 0.0;
          for (int w = 0; w < n; ++w) tree += g(w, i) * g(w, j) * g(w, k) * g(w, l);
          rep.max_violation = std::max(rep.max_violation, std::abs(u4) - 2.0 * tree);
          rep.max_u4 = std::max(rep.max_u4, u4);
          ++rep.quadruples;
        }
  return rep;
}

}  // namespace lrising::mc
