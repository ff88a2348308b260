#pragma once

#include <cstdint>

namespace sqf {

/// SplitMix64 generator. The update rule is fixed so that seeded runs are
/// reproducible bit-for-bit across platforms:
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   output = z ^ (z >> 31)
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, n), n > 0. Rejection-free modulo; bias is irrelevant at
  /// the sample sizes used here but the sequence must stay deterministic.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  /// Uniform in [lo, hi], inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  /// Nonzero value in [-m, m].
  std::int64_t nonzero(std::int64_t m) {
    while (true) {
      std::int64_t v = range(-m, m);
      if (v != 0) return v;
    }
  }
};

}  // namespace sqf
