#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace lrising::numerics {

// Neumaier's variant of compensated summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  void merge(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Sums fn(i) for i in [0, n) split into fixed chunks. Each chunk is summed with
// CompensatedSum and the chunk totals are merged in index order, so the result
// does not depend on the number of OpenMP threads.
template <class Fn>
double chunked_sum(std::int64_t n, std::int64_t chunk, Fn&& fn) {
  if (n <= 0) return 0.0;
  if (chunk < 1) chunk = 1;
  const std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<CompensatedSum> partial(static_cast<std::size_t>(nchunks));
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(n, lo + chunk);
    CompensatedSum acc;
    for (std::int64_t i = lo; i < hi; ++i) acc.add(fn(i));
    partial[static_cast<std::size_t>(c)] = acc;
  }
  CompensatedSum total;
  for (const auto& p : partial) total.merge(p);
  return total.value();
}

}  // namespace lrising::numerics
