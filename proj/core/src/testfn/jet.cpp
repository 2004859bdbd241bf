#include "lrising/testfn/jet.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include "lrising/errors.hpp"

namespace lrising::testfn {

JetSpace::JetSpace(int d, int order) : d_(d), order_(order) {
  for (int k = 0; k <= order; ++k) {
    offsets_.push_back(monomials_.size());
    for (auto& m : multi_indices(d, k)) monomials_.push_back(std::move(m));
  }
  offsets_.push_back(monomials_.size());
  for (int i = 0; i < d; ++i) {
    std::vector<int> e(static_cast<std::size_t>(d), 0);
    e[static_cast<std::size_t>(i)] = 1;
    units_.push_back(order >= 1 ? index(MultiIndex(e)) : 0);
  }
  std::vector<int> sum(static_cast<std::size_t>(d));
  for (std::size_t a = 0; a < monomials_.size(); ++a) {
    const int oa = monomials_[a].order();
    for (std::size_t b = 0; b < monomials_.size(); ++b) {
      if (oa + monomials_[b].order() > order) break;
      for (int i = 0; i < d; ++i)
        sum[static_cast<std::size_t>(i)] = monomials_[a].gamma[static_cast<std::size_t>(i)] + monomials_[b].gamma[static_cast<std::size_t>(i)];
      products_.push_back({a, b, index(MultiIndex(sum))});
    }
  }
}

std::size_t JetSpace::index(const MultiIndex& g) const {
  if (g.dim() != d_) throw DomainError("JetSpace: dimension mismatch");
  const int k = g.order();
  if (k > order_) throw CapabilityError("JetSpace: multi-index order exceeds jet order");
  // Within a degree, multi_indices lists entries in decreasing lexicographic order.
  std::size_t lo = offsets_[static_cast<std::size_t>(k)], hi = offsets_[static_cast<std::size_t>(k) + 1];
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (monomials_[mid].gamma == g.gamma) return mid;
    if (monomials_[mid].gamma > g.gamma)
      lo = mid + 1;
    else
      hi = mid;
  }
  throw DomainError("JetSpace: monomial not found");
}

const JetSpace& JetSpace::get(int d, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{d, order}];
  if (!slot) slot.reset(new JetSpace(d, order));
  return *slot;
}

Jet::Jet(int d, int order) : space(&JetSpace::get(d, order)), c(space->size(), 0.0) {}

double Jet::evaluate(std::span<const double> t) const {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (c[i] != 0.0) s += c[i] * space->monomial(i).power(t);
  return s;
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (auto& v : c) v *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.space = a.space;
  r.c.assign(a.c.size(), 0.0);
  for (const auto& p : a.space->products()) r.c[p.c] += a.c[p.a] * b.c[p.b];
  return r;
}

Jet compose(std::span<const double> series, const Jet& u) {
  Jet delta = u;
  delta.c[0] = 0.0;
  const int n = std::min<int>(static_cast<int>(series.size()) - 1, u.space->order());
  Jet r;
  r.space = u.space;
  r.c.assign(u.c.size(), 0.0);
  r.c[0] = series[static_cast<std::size_t>(n)];
  for (int k = n - 1; k >= 0; --k) {
    r = r * delta;
    r.c[0] += series[static_cast<std::size_t>(k)];
  }
  return r;
}

}  // namespace lrising::testfn
