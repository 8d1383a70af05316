#pragma once

#include <cstdint>

namespace rismp {

/// Deterministic counter-based generator (SplitMix64 finalizer over a keyed
/// counter). Any (seed, stream, counter) triple maps to the same value in
/// any evaluation order, so Monte-Carlo trials and grid cells can be drawn
/// independently and in parallel without shared state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(mix(seed + kGolden) ^ mix(stream + 0x4cf5ad432745937full))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + kGolden * (counter + 1));
  }

  /// Uniform double in [0, 1).
  double uniform(std::uint64_t counter) const {
    return double(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
};

/// Convenience wrapper that hands out consecutive counters.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : rng_(seed, stream) {}

  double operator()() { return rng_.uniform(next_++); }
  double operator()(double lo, double hi) { return rng_.uniform(next_++, lo, hi); }

 private:
  CounterRng rng_;
  std::uint64_t next_ = 0;
};

}  // namespace rismp
