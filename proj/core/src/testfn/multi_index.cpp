#include "lrising/testfn/multi_index.hpp"

#include <cmath>

#include "lrising/errors.hpp"
#include "lrising/numerics/special.hpp"

namespace lrising::testfn {

MultiIndex::MultiIndex(std::vector<int> g) : gamma(std::move(g)) {
  for (int v : gamma)
    if (v < 0) throw DomainError("MultiIndex: entries must be nonnegative");
}

int MultiIndex::order() const {
  int s = 0;
  for (int v : gamma) s += v;
  return s;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int v : gamma) f *= numerics::factorial(v);
  return f;
}

bool MultiIndex::any_odd() const {
  for (int v : gamma)
    if (v % 2) return true;
  return false;
}

double MultiIndex::power(std::span<const double> x) const {
  double p = 1.0;
  for (std::size_t i = 0; i < gamma.size(); ++i)
    for (int k = 0; k < gamma[i]; ++k) p *= x[i];
  return p;
}

std::string MultiIndex::str() const {
  std::string s = "(";
  for (std::size_t i = 0; i < gamma.size(); ++i) s += (i ? "," : "") + std::to_string(gamma[i]);
  return s + ")";
}

namespace {

void fill(int d, int pos, int remaining, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    cur[static_cast<std::size_t>(pos)] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[static_cast<std::size_t>(pos)] = k;
    fill(d, pos + 1, remaining - k, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices(int d, int order) {
  if (d < 1 || order < 0) throw DomainError("multi_indices: bad arguments");
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(d));
  fill(d, 0, order, cur, out);
  return out;
}

}  // namespace lrising::testfn
