#pragma once

// Counter-based randomness. Every draw is a pure function of (seed, counter),
// so sampling is reproducible bit-for-bit and independent of evaluation order.

#include <cstdint>

namespace btsbm {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer (Stafford's mix variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Output number `counter` (0-based) of a SplitMix64 stream whose state
/// starts at `seed`: mix64(seed + (counter + 1) * gamma).
constexpr std::uint64_t counter_output(std::uint64_t seed, std::uint64_t counter) noexcept {
  return mix64(seed + (counter + 1) * kGoldenGamma);
}

/// Top 53 bits mapped to [0, 1).
constexpr double to_unit_interval(std::uint64_t x) noexcept {
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

constexpr double uniform_at(std::uint64_t seed, std::uint64_t counter) noexcept {
  return to_unit_interval(counter_output(seed, counter));
}

/// Seed of Monte Carlo trial t under a master seed.
constexpr std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) noexcept {
  return mix64(master_seed ^ trial);
}

/// Sequential generator over the same counter-based stream, satisfying
/// UniformRandomBitGenerator for use with <random> and std::shuffle.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed) noexcept : seed_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept { return counter_output(seed_, counter_++); }
  double uniform() noexcept { return to_unit_interval((*this)()); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace btsbm
