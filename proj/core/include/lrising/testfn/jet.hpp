#pragma once

#include <span>
#include <vector>

#include "lrising/testfn/multi_index.hpp"

namespace lrising::testfn {

// Monomials of total degree <= order in d variables, with a precomputed product table.
class JetSpace {
 public:
  static const JetSpace& get(int d, int order);

  int dim() const { return d_; }
  int order() const { return order_; }
  std::size_t size() const { return monomials_.size(); }
  const MultiIndex& monomial(std::size_t i) const { return monomials_[i]; }
  std::size_t index(const MultiIndex& g) const;
  std::size_t unit(int axis) const { return units_[static_cast<std::size_t>(axis)]; }

  struct Product {
    std::size_t a, b, c;
  };
  const std::vector<Product>& products() const { return products_; }

 private:
  JetSpace(int d, int order);
  int d_, order_;
  std::vector<MultiIndex> monomials_;
  std::vector<std::size_t> offsets_;  // first index of each total degree
  std::vector<std::size_t> units_;
  std::vector<Product> products_;
};

// Truncated Taylor polynomial sum_gamma c_gamma t^gamma around a base point.
// c_gamma = d^gamma f / gamma!.
struct Jet {
  const JetSpace* space = nullptr;
  std::vector<double> c;

  Jet() = default;
  Jet(int d, int order);

  double constant() const { return c[0]; }
  double coeff(const MultiIndex& g) const { return c[space->index(g)]; }
  double derivative(const MultiIndex& g) const { return coeff(g) * g.factorial(); }
  // Evaluates the polynomial at displacement t.
  double evaluate(std::span<const double> t) const;

  Jet& operator+=(const Jet& o);
  Jet& operator*=(double s);
  friend Jet operator*(const Jet& a, const Jet& b);
};

// Jet of phi(u) where u is a jet and phi has Taylor coefficients series[n] = phi^(n)(u0)/n!
// at u0 = u.constant().
Jet compose(std::span<const double> series, const Jet& u);

}  // namespace lrising::testfn
