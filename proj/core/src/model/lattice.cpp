#include "lrising/model/lattice.hpp"

#include <cstdlib>

#include "lrising/errors.hpp"

namespace lrising::model {

LatticeBox::LatticeBox(int dim, int L, Point c) : d(dim), half_width(L), center(std::move(c)) {
  if (d < 1) throw DomainError("LatticeBox: dimension must be positive");
  if (L < 0) throw DomainError("LatticeBox: half-width must be nonnegative");
  if (!center.empty() && static_cast<int>(center.size()) != d) throw DomainError("LatticeBox: center dimension");
}

std::int64_t LatticeBox::size() const {
  std::int64_t n = 1;
  for (int i = 0; i < d; ++i) n *= 2 * static_cast<std::int64_t>(half_width) + 1;
  return n;
}

bool LatticeBox::contains(std::span<const int> x) const {
  if (static_cast<int>(x.size()) != d) return false;
  for (int i = 0; i < d; ++i)
    if (std::abs(x[static_cast<std::size_t>(i)] - center_coord(i)) > half_width) return false;
  return true;
}

std::vector<Point> LatticeBox::sites() const {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(size()));
  Point x(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = center_coord(i) - half_width;
  while (true) {
    out.push_back(x);
    int i = d - 1;
    while (i >= 0 && x[static_cast<std::size_t>(i)] == center_coord(i) + half_width) {
      x[static_cast<std::size_t>(i)] = center_coord(i) - half_width;
      --i;
    }
    if (i < 0) break;
    ++x[static_cast<std::size_t>(i)];
  }
  return out;
}

RectBox::RectBox(std::vector<int> ext, Point org) : extents(std::move(ext)), origin(std::move(org)) {
  if (extents.empty()) throw DomainError("RectBox: no axes");
  for (int e : extents)
    if (e < 1) throw DomainError("RectBox: extents must be positive");
  if (origin.empty()) origin.assign(extents.size(), 0);
  if (origin.size() != extents.size()) throw DomainError("RectBox: origin dimension");
}

std::int64_t RectBox::size() const {
  std::int64_t n = 1;
  for (int e : extents) n *= e;
  return n;
}

bool RectBox::contains(std::span<const int> x) const {
  if (x.size() != extents.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int k = x[i] - origin[i];
    if (k < 0 || k >= extents[i]) return false;
  }
  return true;
}

std::int64_t RectBox::index(std::span<const int> x) const {
  if (!contains(x)) throw CoverageError("RectBox: site outside box");
  std::int64_t idx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) idx = idx * extents[i] + (x[i] - origin[i]);
  return idx;
}

Point RectBox::site(std::int64_t index) const {
  Point x(extents.size());
  for (std::size_t i = extents.size(); i-- > 0;) {
    x[i] = origin[i] + static_cast<int>(index % extents[i]);
    index /= extents[i];
  }
  return x;
}

Point RectBox::central_site() const {
  Point x(extents.size());
  for (std::size_t i = 0; i < extents.size(); ++i) x[i] = origin[i] + (extents[i] - 1) / 2;
  return x;
}

RectBox RectBox::centered_cube(int d, int L) {
  return RectBox(std::vector<int>(static_cast<std::size_t>(d), 2 * L + 1), Point(static_cast<std::size_t>(d), -L));
}

}  // namespace lrising::model
