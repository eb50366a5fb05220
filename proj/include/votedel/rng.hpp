#pragma once

#include <array>
#include <cstdint>

// Deterministic random number primitives. Everything here is fixed-width
// integer arithmetic, so streams are bit-identical across platforms and
// compilers — std::* distributions are deliberately avoided.

namespace votedel {

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

class Xoshiro256PlusPlus {
 public:
  explicit Xoshiro256PlusPlus(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

// Sub-stream rule: trial t draws from an engine seeded with
// seed + (t+1) * 2^64/phi. Distinct trials get decorrelated SplitMix64-washed
// states, and any partition of [0, trials) over workers reproduces the serial
// run exactly.
inline Xoshiro256PlusPlus trial_stream(std::uint64_t seed, std::uint64_t trial_index) {
  return Xoshiro256PlusPlus(seed + (trial_index + 1) * 0x9E3779B97F4A7C15ULL);
}

// Uniform double in [0, 1) with 53 random mantissa bits.
template <class Rng>
double uniform_unit(Rng& rng) {
  return static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
}

template <class Rng>
bool bernoulli(Rng& rng, double prob) {
  return uniform_unit(rng) < prob;
}

// Unbiased integer in [0, bound) via rejection; bound must be >= 1.
template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t x = rng.next();
    if (x >= threshold) return x % bound;
  }
}

}  // namespace votedel
