#pragma once

#include <cstdint>
#include <random>

namespace zsim {

// SplitMix64 finalizer (Steele et al.). Bijective on 64-bit words.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed for run `index` of a batch with seed `base_seed`. Stateless, so the
// stream a run gets never depends on scheduling or thread count. For a fixed
// base the map index -> seed is a composition of bijections and cannot
// collide.
inline std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t index) {
  return splitmix64(splitmix64(base_seed) ^ (index * 0xA24BAED4963EE407ull + 0x9FB21C651E98DF25ull));
}

// Deterministic random stream. The core is std::mt19937_64, whose output
// sequence is pinned by the C++ standard, seeded with a single 64-bit value.
// All variate generation is hand-rolled on top of next_u64() because the
// std::*_distribution classes are implementation-defined and would break
// cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n), n >= 1. Bias from the double path is < 2^-50 for the
  // small n (< 16) this simulator draws.
  std::uint32_t uniform_below(std::uint32_t n) {
    auto i = static_cast<std::uint32_t>(uniform01() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace zsim
