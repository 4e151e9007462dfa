#pragma once

#include <cstdint>

namespace dagdepth {

// splitmix64. The finalizer is a bijection on 64-bit words and the state walks
// an arithmetic progression, so the n-th output of a stream seeded with s is
// finalize(s + n*kGamma). That gives O(1) discard and random access by stream
// index, which the branching-walk simulation uses to tie variates to tree
// nodes instead of visit order.
class SplitMix64 {
public:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next_u64() { return finalize(state_ += kGamma); }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_double() { return to_unit(next_u64()); }

  constexpr void discard(std::uint64_t n) { state_ += n * kGamma; }

  // Output with 1-based stream index: at(s, 1) == SplitMix64(s).next_u64().
  static constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t index) {
    return finalize(seed + index * kGamma);
  }

  static double unit_at(std::uint64_t seed, std::uint64_t index) {
    return to_unit(at(seed, index));
  }

  static constexpr std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static double to_unit(std::uint64_t z) { return static_cast<double>(z >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

// Seed of replication stream i derived statelessly from the master seed.
// Injective in the index for any fixed master: the state increments are odd,
// so seed + (i+1)*kGamma never collides mod 2^64, and the finalizer is a
// bijection. Avalanche of the finalizer keeps neighbouring indices unrelated.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t stream_index) {
  return SplitMix64::at(master_seed, stream_index + 1);
}

}  // namespace dagdepth
