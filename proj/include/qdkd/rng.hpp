#pragma once

// Per-round random streams.
//
// Round seeds are derived with SplitMix64 so that a round's randomness depends
// only on (master_seed, round index):
//
//   splitmix64(x):  z = x + 0x9E3779B97F4A7C15
//                   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//                   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                   return z ^ (z >> 31)
//   round_seed(s, i) = splitmix64(s ^ splitmix64(i))
//
// The round stream is std::mt19937_64 seeded with round_seed; uniforms take
// the top 53 bits of each 64-bit output, u = (w >> 11) * 2^-53, so every
// value is reproducible across standard libraries. A Bernoulli(q) event
// occurs iff u < q.

#include <cstdint>
#include <random>
#include <span>

namespace qdkd {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t round_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return splitmix64(master_seed ^ splitmix64(index));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_round(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(round_seed(master_seed, index));
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double probability) { return uniform() < probability; }

  int bit() { return bernoulli(0.5) ? 1 : 0; }

  // Inverse-CDF selection over a fixed outcome ordering, one uniform per call.
  // Zero-probability outcomes are never returned.
  std::size_t pick(std::span<const double> probabilities) {
    const double u = uniform();
    double cumulative = 0.0;
    std::size_t last_nonzero = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
      if (probabilities[i] <= 0.0) continue;
      last_nonzero = i;
      cumulative += probabilities[i];
      if (u < cumulative) return i;
    }
    return last_nonzero;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qdkd
