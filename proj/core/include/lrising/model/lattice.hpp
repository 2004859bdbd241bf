#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lrising::model {

using Point = std::vector<int>;

// Lambda_L(center) = center + [-L, L]^d.
struct LatticeBox {
  int d = 2;
  int half_width = 0;
  Point center;  // empty means origin

  LatticeBox() = default;
  LatticeBox(int dim, int L, Point c = {});

  std::int64_t size() const;
  bool contains(std::span<const int> x) const;
  int center_coord(int i) const { return center.empty() ? 0 : center[static_cast<std::size_t>(i)]; }
  std::vector<Point> sites() const;
};

// Rectangular box origin + prod_i [0, extents_i), row-major with the last axis fastest.
struct RectBox {
  std::vector<int> extents;
  Point origin;

  RectBox() = default;
  explicit RectBox(std::vector<int> ext, Point org = {});

  int dim() const { return static_cast<int>(extents.size()); }
  std::int64_t size() const;
  bool contains(std::span<const int> x) const;
  std::int64_t index(std::span<const int> x) const;
  Point site(std::int64_t index) const;
  // Site closest to the geometric centre (rounding down).
  Point central_site() const;

  // A box of side 2L + 1 centred at the origin.
  static RectBox centered_cube(int d, int L);
};

}  // namespace lrising::model
