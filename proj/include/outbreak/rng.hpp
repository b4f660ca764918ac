#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

// Deterministic random machinery shared by every module.
//
// All randomness flows from SplitMix64 (Steele, Lea & Flood 2014). Derived
// streams are obtained by hashing (seed, stream id) through the SplitMix64
// finalizer, so independent work items (trees, synthetic rows, missing
// cells) can each own a stream and produce identical results whether they
// run serially or in parallel. Normal deviates use the basic Box-Muller
// transform; bounded integers use Lemire's multiply-shift rejection method.
// Results are bit-stable across platforms because nothing here depends on
// the standard library's unspecified distributions.

namespace outbreak::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer: mixes a 64-bit value into a well-distributed word.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives an independent child seed from (seed, stream).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed + kGolden * (stream + 1));
}

// SplitMix64 engine; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += kGolden;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(SplitMix64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; consumes two words per draw.
inline double normal(SplitMix64& g) {
  // u1 in (0, 1] so the log never sees zero.
  const double u1 = (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(g() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Uniform integer in [0, bound), bound >= 1. Lemire with rejection.
inline std::uint64_t bounded(SplitMix64& g, std::uint64_t bound) {
  while (true) {
    const std::uint64_t x = g();
    const auto m = static_cast<unsigned __int128>(x) * bound;
    const auto lo = static_cast<std::uint64_t>(m);
    if (lo >= bound || lo >= std::uint64_t(-bound) % bound) {
      return static_cast<std::uint64_t>(m >> 64);
    }
  }
}

// In-place Fisher-Yates shuffle with pinned draw order.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& g) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(bounded(g, i));
    std::swap(v[i - 1], v[j]);
  }
}

// Counter-addressed stream: one independent draw site per counter value,
// so per-cell work can be scheduled in any order.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t seed) : seed_(seed) {}

  double normal_at(std::uint64_t counter) const {
    SplitMix64 g(derive(seed_, counter));
    return rng::normal(g);
  }

  double uniform_at(std::uint64_t counter) const {
    SplitMix64 g(derive(seed_, counter));
    return rng::uniform01(g);
  }

  std::uint64_t bounded_at(std::uint64_t counter, std::uint64_t bound) const {
    SplitMix64 g(derive(seed_, counter));
    return rng::bounded(g, bound);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace outbreak::rng
