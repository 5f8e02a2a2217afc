#pragma once

#include <cstddef>
#include <cstdint>

namespace abcheck {

/// Seedable counter-based generator. Output i for key k is the SplitMix64
/// finalizer applied to k + (i + 1) * 0x9E3779B97F4A7C15, so any draw can be
/// recomputed from (key, counter) alone. Normal variates use Box-Muller with
/// the cosine branch only, so each normal consumes exactly two counters.
/// Nothing here depends on the standard library's distribution
/// implementations, which differ between vendors.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  [[nodiscard]] static std::uint64_t at(std::uint64_t key, std::uint64_t counter);

  std::uint64_t next_u64() { return at(key_, counter_++); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform on {0, ..., n - 1}, unbiased by rejection. n must be > 0.
  std::size_t uniform_index(std::size_t n);
  /// Normal(mean, variance).
  double normal(double mean, double variance);

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace abcheck
