#pragma once

#include <cstdint>
#include <random>

namespace invcog {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for replicate/particle `index` under a base seed.
/// Depends only on (seed, index), never on thread count.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace invcog

namespace invcog {

/// Lightweight SplitMix64 engine for per-particle streams, which are created
/// in bulk and must be cheap to construct.
class SplitMix {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Engine keyed by (seed, a, b), e.g. (seed, step, particle).
inline SplitMix keyed_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return SplitMix(splitmix64(splitmix64(seed ^ splitmix64(a)) ^ (b * 0xd6e8feb86659fd93ULL)));
}

}  // namespace invcog
