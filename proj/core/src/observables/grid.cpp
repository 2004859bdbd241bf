#include "lrising/observables/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "lrising/errors.hpp"
#include "lrising/numerics/summation.hpp"

namespace lrising::observables {

using model::RectBox;

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int fft_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

}  // namespace

RectBox lattice_support(const testfn::TestFunction& f, int L) {
  if (L < 1) throw DomainError("lattice_support: L must be positive");
  std::vector<int> ext(static_cast<std::size_t>(f.dim()));
  model::Point org(static_cast<std::size_t>(f.dim()));
  for (int i = 0; i < f.dim(); ++i) {
    const auto [lo, hi] = f.axis_support(i);
    const int a = static_cast<int>(std::ceil(lo * L));
    const int b = static_cast<int>(std::floor(hi * L));
    org[static_cast<std::size_t>(i)] = a;
    ext[static_cast<std::size_t>(i)] = std::max(0, b - a + 1);
  }
  return RectBox(ext, org);
}

DenseGrid sample(const testfn::TestFunction& f, int L, const RectBox& box) {
  DenseGrid g{box, std::vector<double>(static_cast<std::size_t>(box.size()))};
  const int d = box.dim();
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::int64_t i = 0; i < box.size(); ++i) {
    const auto p = box.site(i);
    for (int k = 0; k < d; ++k) x[static_cast<std::size_t>(k)] = static_cast<double>(p[static_cast<std::size_t>(k)]) / L;
    g.values[static_cast<std::size_t>(i)] = f(x);
  }
  return g;
}

DenseGrid cross_correlate_fft(const DenseGrid& a, const DenseGrid& b) {
  const int d = a.box.dim();
  if (b.box.dim() != d) throw DomainError("cross_correlate: dimension mismatch");
  std::vector<int> n(static_cast<std::size_t>(d)), ext(static_cast<std::size_t>(d));
  model::Point org(static_cast<std::size_t>(d));
  std::int64_t total = 1, half_total = 1;
  for (int i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const int na = a.box.extents[k], nb = b.box.extents[k];
    ext[k] = na + nb - 1;
    // z = (y - x) with x in a, y in b: smallest is b.origin - (a.origin + na - 1).
    org[k] = b.box.origin[k] - a.box.origin[k] - (na - 1);
    n[k] = fft_size(ext[k]);
    total *= n[k];
    half_total *= (i == d - 1) ? n[k] / 2 + 1 : n[k];
  }
  DenseGrid out{RectBox(ext, org), std::vector<double>(static_cast<std::size_t>(std::max<std::int64_t>(0, RectBox(ext, org).size())))};
  if (a.box.size() == 0 || b.box.size() == 0) return out;

  double* ra = fftw_alloc_real(static_cast<std::size_t>(total));
  double* rb = fftw_alloc_real(static_cast<std::size_t>(total));
  fftw_complex* ca = fftw_alloc_complex(static_cast<std::size_t>(half_total));
  fftw_complex* cb = fftw_alloc_complex(static_cast<std::size_t>(half_total));
  std::fill(ra, ra + total, 0.0);
  std::fill(rb, rb + total, 0.0);

  auto scatter = [&](const DenseGrid& g, double* dst) {
    std::vector<int> idx(static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < g.box.size(); ++i) {
      std::int64_t r = i, flat = 0;
      for (int k = d - 1; k >= 0; --k) {
        idx[static_cast<std::size_t>(k)] = static_cast<int>(r % g.box.extents[static_cast<std::size_t>(k)]);
        r /= g.box.extents[static_cast<std::size_t>(k)];
      }
      for (int k = 0; k < d; ++k) flat = flat * n[static_cast<std::size_t>(k)] + idx[static_cast<std::size_t>(k)];
      dst[flat] = g.values[static_cast<std::size_t>(i)];
    }
  };
  scatter(a, ra);
  scatter(b, rb);

  fftw_plan pa, pb, inv;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    pa = fftw_plan_dft_r2c(d, n.data(), ra, ca, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c(d, n.data(), rb, cb, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r(d, n.data(), ca, ra, FFTW_ESTIMATE);
  }
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::int64_t i = 0; i < half_total; ++i) {
    // conj(A) * B
    const double re = ca[i][0] * cb[i][0] + ca[i][1] * cb[i][1];
    const double im = ca[i][0] * cb[i][1] - ca[i][1] * cb[i][0];
    ca[i][0] = re;
    ca[i][1] = im;
  }
  fftw_execute(inv);

  // Circular lag s = z - (b.origin - a.origin) lies in [-(na - 1), nb - 1].
  const double scale = 1.0 / static_cast<double>(total);
  std::vector<int> idx(static_cast<std::size_t>(d));
  for (std::int64_t i = 0; i < out.box.size(); ++i) {
    std::int64_t r = i, flat = 0;
    for (int k = d - 1; k >= 0; --k) {
      idx[static_cast<std::size_t>(k)] = static_cast<int>(r % ext[static_cast<std::size_t>(k)]);
      r /= ext[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < d; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      int s = idx[kk] - (a.box.extents[kk] - 1);
      if (s < 0) s += n[kk];
      flat = flat * n[kk] + s;
    }
    out.values[static_cast<std::size_t>(i)] = ra[flat] * scale;
  }

  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(inv);
  }
  fftw_free(ra);
  fftw_free(rb);
  fftw_free(ca);
  fftw_free(cb);
  return out;
}

DenseGrid cross_correlate_direct(const DenseGrid& a, const DenseGrid& b) {
  const int d = a.box.dim();
  std::vector<int> ext(static_cast<std::size_t>(d));
  model::Point org(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    const auto k = static_cast<std::size_t>(i);
    ext[k] = a.box.extents[k] + b.box.extents[k] - 1;
    org[k] = b.box.origin[k] - a.box.origin[k] - (a.box.extents[k] - 1);
  }
  DenseGrid out{RectBox(ext, org), {}};
  out.values.assign(static_cast<std::size_t>(out.box.size()), 0.0);
  std::vector<numerics::CompensatedSum> acc(out.values.size());
  std::vector<int> z(static_cast<std::size_t>(d));
  for (std::int64_t i = 0; i < a.box.size(); ++i) {
    const double av = a.values[static_cast<std::size_t>(i)];
    if (av == 0.0) continue;
    const auto x = a.box.site(i);
    for (std::int64_t j = 0; j < b.box.size(); ++j) {
      const auto y = b.box.site(j);
      for (int k = 0; k < d; ++k) z[static_cast<std::size_t>(k)] = y[static_cast<std::size_t>(k)] - x[static_cast<std::size_t>(k)];
      acc[static_cast<std::size_t>(out.box.index(z))].add(av * b.values[static_cast<std::size_t>(j)]);
    }
  }
  for (std::size_t i = 0; i < acc.size(); ++i) out.values[i] = acc[i].value();
  return out;
}

model::AxisWeights cross_correlate_axis(const std::vector<double>& a, int a_origin, const std::vector<double>& b,
                                        int b_origin) {
  const int na = static_cast<int>(a.size()), nb = static_cast<int>(b.size());
  if (na == 0 || nb == 0) return {0.0};
  const int kmin = b_origin - (a_origin + na - 1);
  const int kmax = (b_origin + nb - 1) - a_origin;
  const int K = std::max(std::abs(kmin), std::abs(kmax));
  model::AxisWeights w(static_cast<std::size_t>(2 * K + 1), 0.0);
  for (int k = kmin; k <= kmax; ++k) {
    numerics::CompensatedSum s;
    // x in a, y = x + k in b.
    const int xlo = std::max(a_origin, b_origin - k), xhi = std::min(a_origin + na - 1, b_origin + nb - 1 - k);
    for (int x = xlo; x <= xhi; ++x)
      s.add(a[static_cast<std::size_t>(x - a_origin)] * b[static_cast<std::size_t>(x + k - b_origin)]);
    w[static_cast<std::size_t>(k + K)] = s.value();
  }
  return w;
}

double grid_sum(const model::TwoPointModel& model, const DenseGrid& grid) {
  const auto& box = grid.box;
  const int d = box.dim();
  if (box.size() == 0) return 0.0;
  const int row = box.extents[static_cast<std::size_t>(d - 1)];
  const std::int64_t rows = box.size() / row;
  return numerics::chunked_sum(rows, 16, [&](std::int64_t r) {
    const double* v = grid.values.data() + r * row;
    model::Point z = box.site(r * row);
    numerics::CompensatedSum acc;
    if (model.is_synthetic()) {
      double base = 0.0;
      for (int k = 0; k < d - 1; ++k) base += static_cast<double>(z[static_cast<std::size_t>(k)]) * z[static_cast<std::size_t>(k)];
      std::vector<double> r2(static_cast<std::size_t>(row)), gv(static_cast<std::size_t>(row));
      const int z0 = z[static_cast<std::size_t>(d - 1)];
      for (int t = 0; t < row; ++t) {
        const double u = z0 + t;
        r2[static_cast<std::size_t>(t)] = base + u * u;
      }
      model.radial_batch(r2.data(), gv.data(), r2.size());
      for (int t = 0; t < row; ++t)
        if (v[t] != 0.0) acc.add(v[t] * gv[static_cast<std::size_t>(t)]);
    } else {
      for (int t = 0; t < row; ++t) {
        if (v[t] != 0.0) acc.add(v[t] * model(z));
        ++z[static_cast<std::size_t>(d - 1)];
      }
    }
    return acc.value();
  });
}

}  // namespace lrising::observables
