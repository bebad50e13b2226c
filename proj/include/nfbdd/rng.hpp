#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace nfbdd {

/// SplitMix64. Small state, so a fresh generator per (run, node, copy)
/// substream costs nothing.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    return mix(z);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of the substream addressed by `path` under `master`. Distinct paths
/// give unrelated streams; the result does not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = SplitMix64::mix(master ^ 0x6a09e667f3bcc909ULL);
  for (auto x : path) h = SplitMix64::mix(h ^ SplitMix64::mix(x + 0x9e3779b97f4a7c15ULL));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits. Platform independent, unlike
/// std::uniform_real_distribution.
inline double uniform01(SplitMix64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// True with probability p. p >= 1 and p <= 0 do not consume randomness.
inline bool bernoulli(SplitMix64& rng, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return uniform01(rng) < p;
}

}  // namespace nfbdd
