#include "lrising/model/lattice_sums.hpp"

#include <algorithm>
#include <cstdint>

#include "lrising/errors.hpp"
#include "lrising/numerics/summation.hpp"

namespace lrising::model {

namespace {

struct Axis {
  const double* w;  // points at k = 0
  int lo, hi;       // summation range of k
  bool folded;
  double at(int k) const { return w[k]; }
  double mult(int k) const { return folded && k > 0 ? 2.0 : 1.0; }
};

Axis make_axis(const AxisWeights& w, bool allow_fold) {
  if (w.size() % 2 == 0) throw DomainError("weighted_lattice_sum: axis weights must have odd length");
  int K = static_cast<int>(w.size() / 2);
  const double* c = w.data() + K;
  // Trim exact zeros at both ends.
  int lo = -K, hi = K;
  while (lo <= hi && c[lo] == 0.0) ++lo;
  while (hi >= lo && c[hi] == 0.0) --hi;
  if (lo > hi) return {c, 0, -1, false};
  bool even = allow_fold && lo == -hi;
  for (int k = 1; even && k <= hi; ++k) even = c[k] == c[-k];
  return even ? Axis{c, 0, hi, true} : Axis{c, lo, hi, false};
}

double table_sum(const TwoPointModel& model, const std::vector<Axis>& axes) {
  const int d = static_cast<int>(axes.size());
  const auto& t = model.table_data();
  for (const auto& a : axes) {
    if (a.lo > a.hi) return 0.0;
    if (t.outside == OutsideRange::Error && (a.hi > t.radius || -a.lo > t.radius || (a.folded && a.hi > t.radius)))
      throw LookupError("weighted_lattice_sum: weights extend beyond the tabulated range");
  }
  std::vector<int> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    lo[static_cast<std::size_t>(i)] = std::max(axes[static_cast<std::size_t>(i)].lo, -t.radius);
    hi[static_cast<std::size_t>(i)] = std::min(axes[static_cast<std::size_t>(i)].hi, t.radius);
    if (lo[static_cast<std::size_t>(i)] > hi[static_cast<std::size_t>(i)]) return 0.0;
  }
  numerics::CompensatedSum acc;
  std::vector<int> z = lo;
  while (true) {
    double w = model(z);
    for (int i = 0; i < d && w != 0.0; ++i) {
      const auto& a = axes[static_cast<std::size_t>(i)];
      const int k = z[static_cast<std::size_t>(i)];
      w *= a.at(k) * a.mult(k);
    }
    acc.add(w);
    int i = d - 1;
    while (i >= 0 && z[static_cast<std::size_t>(i)] == hi[static_cast<std::size_t>(i)]) {
      z[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)];
      --i;
    }
    if (i < 0) break;
    ++z[static_cast<std::size_t>(i)];
  }
  return acc.value();
}

bool same_axes(const std::vector<Axis>& axes) {
  for (const auto& a : axes) {
    if (!a.folded || a.hi != axes[0].hi) return false;
    for (int k = 0; k <= a.hi; ++k)
      if (a.at(k) != axes[0].at(k)) return false;
  }
  return true;
}

// All axes carry the same even weights: sum over z_1 >= z_2 (>= z_3) >= 0 and weight each
// representative by the size of its signed-permutation orbit.
double synthetic_sum_cube_2d(const TwoPointModel& model, const Axis& a) {
  const std::int64_t n = a.hi + 1;
  return numerics::chunked_sum(n, 16, [&](std::int64_t i) {
    const int z1 = static_cast<int>(i);
    const double r1 = static_cast<double>(z1) * z1;
    if (z1 == 0) return a.at(0) * a.at(0);
    // z2 = 0 and z2 = z1 have orbit 4; interior points 0 < z2 < z1 have orbit 8.
    thread_local std::vector<double> r2, g;
    const std::size_t m = static_cast<std::size_t>(z1) + 1;
    r2.resize(m);
    g.resize(m);
    for (std::size_t t = 0; t < m; ++t) r2[t] = r1 + static_cast<double>(t) * static_cast<double>(t);
    model.radial_batch(r2.data(), g.data(), m);
    double acc[4] = {0, 0, 0, 0};
    std::size_t t = 1;
    for (; t + 3 < m - 1; t += 4)
      for (std::size_t u = 0; u < 4; ++u) acc[u] += a.at(static_cast<int>(t + u)) * g[t + u];
    for (; t < m - 1; ++t) acc[0] += a.at(static_cast<int>(t)) * g[t];
    const double inner = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    return a.at(z1) * (8.0 * inner + 4.0 * a.at(0) * g[0] + 4.0 * a.at(z1) * model.radial(2.0 * r1));
  });
}

double orbit_size_3d(int a, int b, int c) {
  const int nz = (a != 0) + (b != 0) + (c != 0);
  int perms = 6;
  if (a == b && b == c)
    perms = 1;
  else if (a == b || b == c || a == c)
    perms = 3;
  return static_cast<double>(perms << nz);
}

double synthetic_sum_cube_3d(const TwoPointModel& model, const Axis& a) {
  const auto sq = [](int v) { return static_cast<std::int64_t>(v) * v; };
  const std::int64_t max_r2 = 3 * sq(a.hi);
  std::vector<double> table;
  const std::int64_t points = static_cast<std::int64_t>(a.hi + 1) * (a.hi + 1) * (a.hi + 1) / 6;
  if (max_r2 <= (std::int64_t{1} << 24) && points > 2 * max_r2) {
    table.resize(static_cast<std::size_t>(max_r2 + 1));
    for (std::int64_t r2 = 0; r2 <= max_r2; ++r2) table[static_cast<std::size_t>(r2)] = model.radial(static_cast<double>(r2));
  }
  auto G = [&](std::int64_t r2) {
    return table.empty() ? model.radial(static_cast<double>(r2)) : table[static_cast<std::size_t>(r2)];
  };
  return numerics::chunked_sum(a.hi + 1, 1, [&](std::int64_t i) {
    const int z1 = static_cast<int>(i);
    numerics::CompensatedSum slab;
    for (int z2 = 0; z2 <= z1; ++z2) {
      const std::int64_t r12 = sq(z1) + sq(z2);
      double inner = 0.0;
      if (z2 >= 2) {
        double acc[4] = {0, 0, 0, 0};
        int z3 = 1;
        if (!table.empty()) {
          const double* g = table.data() + r12;
          for (; z3 + 3 < z2; z3 += 4)
            for (int u = 0; u < 4; ++u) acc[u] += a.at(z3 + u) * g[sq(z3 + u)];
          for (; z3 < z2; ++z3) acc[0] += a.at(z3) * g[sq(z3)];
        } else {
          for (; z3 < z2; ++z3) acc[0] += a.at(z3) * model.radial(static_cast<double>(r12 + sq(z3)));
        }
        inner = ((acc[0] + acc[1]) + (acc[2] + acc[3])) * (z1 == z2 ? 24.0 : 48.0);
      }
      inner += orbit_size_3d(z1, z2, 0) * a.at(0) * G(r12);
      if (z2 > 0) inner += orbit_size_3d(z1, z2, z2) * a.at(z2) * G(r12 + sq(z2));
      slab.add(a.at(z2) * inner);
    }
    return a.at(z1) * slab.value();
  });
}

double synthetic_sum_2d(const TwoPointModel& model, const Axis& a, const Axis& b) {
  const std::int64_t n = a.hi - a.lo + 1;
  return numerics::chunked_sum(n, 8, [&](std::int64_t i) {
    const int z1 = a.lo + static_cast<int>(i);
    const double r1 = static_cast<double>(z1) * z1;
    thread_local std::vector<double> r2, g;
    const std::size_t m = static_cast<std::size_t>(b.hi - b.lo + 1);
    r2.resize(m);
    g.resize(m);
    for (std::size_t t = 0; t < m; ++t) {
      const double z2 = b.lo + static_cast<double>(t);
      r2[t] = r1 + z2 * z2;
    }
    model.radial_batch(r2.data(), g.data(), m);
    double row = 0.0;
    for (std::size_t t = 0; t < m; ++t) {
      const int z2 = b.lo + static_cast<int>(t);
      row += b.at(z2) * b.mult(z2) * g[t];
    }
    return a.at(z1) * a.mult(z1) * row;
  });
}

double synthetic_sum_3d(const TwoPointModel& model, const Axis& a, const Axis& b, const Axis& c) {
  const auto sq = [](int v) { return static_cast<std::int64_t>(v) * v; };
  const std::int64_t max_r2 = std::max(sq(a.lo), sq(a.hi)) + std::max(sq(b.lo), sq(b.hi)) + std::max(sq(c.lo), sq(c.hi));
  const std::int64_t points = static_cast<std::int64_t>(a.hi - a.lo + 1) * (b.hi - b.lo + 1) * (c.hi - c.lo + 1);
  std::vector<double> table;
  if (max_r2 <= (std::int64_t{1} << 24) && points > 2 * max_r2) {
    table.resize(static_cast<std::size_t>(max_r2 + 1));
    for (std::int64_t r2 = 0; r2 <= max_r2; ++r2) table[static_cast<std::size_t>(r2)] = model.radial(static_cast<double>(r2));
  }
  std::vector<double> wc(static_cast<std::size_t>(c.hi - c.lo + 1));
  for (int z3 = c.lo; z3 <= c.hi; ++z3) wc[static_cast<std::size_t>(z3 - c.lo)] = c.at(z3) * c.mult(z3);
  const std::int64_t n = a.hi - a.lo + 1;
  return numerics::chunked_sum(n, 1, [&](std::int64_t i) {
    const int z1 = a.lo + static_cast<int>(i);
    numerics::CompensatedSum slab;
    for (int z2 = b.lo; z2 <= b.hi; ++z2) {
      const std::int64_t r12 = sq(z1) + sq(z2);
      double row = 0.0;
      if (!table.empty()) {
        const double* g = table.data() + r12;
        for (int z3 = c.lo; z3 <= c.hi; ++z3) row += wc[static_cast<std::size_t>(z3 - c.lo)] * g[sq(z3)];
      } else {
        for (int z3 = c.lo; z3 <= c.hi; ++z3)
          row += wc[static_cast<std::size_t>(z3 - c.lo)] * model.radial(static_cast<double>(r12 + sq(z3)));
      }
      slab.add(b.at(z2) * b.mult(z2) * row);
    }
    return a.at(z1) * a.mult(z1) * slab.value();
  });
}

double synthetic_sum_generic(const TwoPointModel& model, const std::vector<Axis>& axes) {
  const int d = static_cast<int>(axes.size());
  numerics::CompensatedSum acc;
  std::vector<int> z(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] = axes[static_cast<std::size_t>(i)].lo;
  while (true) {
    double r2 = 0.0, w = 1.0;
    for (int i = 0; i < d; ++i) {
      const int k = z[static_cast<std::size_t>(i)];
      r2 += static_cast<double>(k) * k;
      w *= axes[static_cast<std::size_t>(i)].at(k) * axes[static_cast<std::size_t>(i)].mult(k);
    }
    acc.add(w * model.radial(r2));
    int i = d - 1;
    while (i >= 0 && z[static_cast<std::size_t>(i)] == axes[static_cast<std::size_t>(i)].hi) {
      z[static_cast<std::size_t>(i)] = axes[static_cast<std::size_t>(i)].lo;
      --i;
    }
    if (i < 0) break;
    ++z[static_cast<std::size_t>(i)];
  }
  return acc.value();
}

}  // namespace

double weighted_lattice_sum(const TwoPointModel& model, std::span<const AxisWeights> weights) {
  const int d = model.dim();
  if (static_cast<int>(weights.size()) != d) throw DomainError("weighted_lattice_sum: dimension mismatch");
  std::vector<Axis> axes;
  // Table models are not assumed to be exactly reflection symmetric, so they are never folded.
  for (const auto& w : weights) axes.push_back(make_axis(w, model.is_synthetic()));
  for (const auto& a : axes)
    if (a.lo > a.hi) return 0.0;
  if (!model.is_synthetic()) return table_sum(model, axes);
  if (d == 2 && same_axes(axes)) return synthetic_sum_cube_2d(model, axes[0]);
  if (d == 2) return synthetic_sum_2d(model, axes[0], axes[1]);
  if (d == 3 && same_axes(axes)) return synthetic_sum_cube_3d(model, axes[0]);
  if (d == 3) return synthetic_sum_3d(model, axes[0], axes[1], axes[2]);
  return synthetic_sum_generic(model, axes);
}

AxisWeights overlap_weights(int L) {
  AxisWeights w(static_cast<std::size_t>(4 * L + 1));
  for (int k = -2 * L; k <= 2 * L; ++k) w[static_cast<std::size_t>(k + 2 * L)] = 2.0 * L + 1.0 - std::abs(k);
  return w;
}

}  // namespace lrising::model
