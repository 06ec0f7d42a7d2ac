#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace mtilink {

// splitmix64 finalizer; used for seeding and stream-key derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream key from (seed, tag, index). Used so that
// per-pair / per-epoch randomness does not depend on execution schedule.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0) {
  return mix64(mix64(mix64(seed) ^ tag) ^ index);
}

// Fixed stream tags per component. Keeping them in one place avoids
// accidental collisions between modules drawing from the same seed.
namespace streams {
inline constexpr std::uint64_t kSplit = 1;
inline constexpr std::uint64_t kInitNetworkBranch = 2;
inline constexpr std::uint64_t kInitMoleculeBranch = 3;
inline constexpr std::uint64_t kInitHead = 4;
inline constexpr std::uint64_t kRebalance = 5;
inline constexpr std::uint64_t kEpochShuffle = 6;
inline constexpr std::uint64_t kNegativeSampling = 7;
inline constexpr std::uint64_t kKnockout = 8;
inline constexpr std::uint64_t kGradCheck = 9;
}  // namespace streams

// xoshiro256** by Blackman & Vigna (public domain reference implementation).
// Portable and fully specified, which the reproducibility contract needs;
// std:: engines have implementation-defined distributions on top.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t key) {
    std::uint64_t x = key;
    for (auto& word : state_) {
      x = mix64(x);
      word = x;
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  Xoshiro256ss(std::uint64_t seed, std::uint64_t tag, std::uint64_t index = 0)
      : Xoshiro256ss(stream_key(seed, tag, index)) {}

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n); classic rejection against 2^64 mod n.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (-n) % n;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  // First k slots of a Fisher-Yates pass over [0, n): a uniform k-subset,
  // in random order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
      std::swap(idx[i], idx[i + below(n - i)]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace mtilink
