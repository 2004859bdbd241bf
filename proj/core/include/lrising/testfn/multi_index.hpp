#pragma once

#include <span>
#include <string>
#include <vector>

namespace lrising::testfn {

struct MultiIndex {
  std::vector<int> gamma;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> g);
  MultiIndex(std::initializer_list<int> g) : MultiIndex(std::vector<int>(g)) {}

  int dim() const { return static_cast<int>(gamma.size()); }
  int order() const;
  double factorial() const;  // gamma! = prod gamma_i!
  bool any_odd() const;
  bool all_even() const { return !any_odd(); }
  int operator[](int i) const { return gamma[static_cast<std::size_t>(i)]; }
  // x^gamma
  double power(std::span<const double> x) const;
  std::string str() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

// All multi-indices in d variables with |gamma| = order, in lexicographically decreasing order.
std::vector<MultiIndex> multi_indices(int d, int order);

}  // namespace lrising::testfn
