// Deterministic counter-based random draws.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mdopt {

// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t hash_u64(std::uint64_t x) { return mix64(x + 0x9e3779b97f4a7c15ull); }

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return hash_u64(h ^ (v * 0xff51afd7ed558ccdull + 0x2545f4914f6cdd1dull));
}

// Counter-based stream keyed by (seed, stream, step): every draw is a pure
// function of the key and a per-draw counter, so replicates and steps can be
// generated independently, in any order, and bitwise-reproducibly across
// serial and parallel execution.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t step)
      : key_(hash_combine(hash_combine(hash_u64(seed), stream), step)) {}

  std::uint64_t next_bits() { return hash_combine(key_, counter_++); }

  // Uniform strictly inside (0, 1).
  double uniform() {
    return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform on the open interval (lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Standard normal by Box-Muller; consumes two uniforms.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mdopt
