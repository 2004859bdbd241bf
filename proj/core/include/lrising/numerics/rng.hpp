#pragma once

#include <cstdint>
#include <limits>

namespace lrising::numerics {

// Counter-based generator. Output i of a stream with key k is
//   mix(k + (i + 1) * 0x9E3779B97F4A7C15)
// where mix is the SplitMix64 finalizer
//   z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31.
// Streams are split by deriving a child key mix(k ^ mix(child_index + 1 + 0xD1B54A32D192ED03)).
// Doubles use the top 53 bits: (u >> 11) * 2^-53, in [0, 1).
// Everything is plain 64-bit integer arithmetic, so streams are identical on every platform.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed = 0, std::uint64_t counter = 0) : key_(mix(seed)), counter_(counter) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t at(std::uint64_t i) const { return mix(key_ + (i + 1) * 0x9E3779B97F4A7C15ULL); }
  std::uint64_t next() { return at(counter_++); }
  result_type operator()() { return next(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n) by 128-bit multiply-shift (Lemire), bias < n / 2^64.
  std::uint64_t below(std::uint64_t n) {
    __extension__ typedef unsigned __int128 u128;
    return static_cast<std::uint64_t>((static_cast<u128>(next()) * n) >> 64);
  }

  CounterRng split(std::uint64_t child) const {
    CounterRng r;
    r.key_ = mix(key_ ^ mix(child + 1 + 0xD1B54A32D192ED03ULL));
    r.counter_ = 0;
    return r;
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace lrising::numerics
