// Deterministic counter-based random streams. Every stream is a pure
// function of a 64-bit key, so a dataset generated with one worker is
// byte-identical to the same dataset generated with many.

#pragma once

#include <cmath>
#include <cstdint>

#include "fpsynth/core.hpp"

namespace fpsynth {

namespace detail {

inline constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline constexpr uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr uint64_t hash_combine(uint64_t h, uint64_t v) {
  return mix64(h ^ (v + kGamma + (h << 6) + (h >> 2)));
}

}  // namespace detail

/// Counter-based pseudo-random stream. Output i is mix64(key + i*gamma),
/// i.e. the splitmix64 sequence seeded at the key. Only integer ops, so
/// sequences are identical across platforms. Not cryptographic.
class RngStream {
public:
  RngStream() = default;
  explicit RngStream(uint64_t key) : key_(key) {}

  uint64_t key() const { return key_; }

  uint64_t next_u64() {
    counter_ += detail::kGamma;
    return detail::mix64(key_ + counter_);
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [lo, hi], inclusive. Uses a 128-bit multiply so
  /// the mapping is order-preserving and platform-stable.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    const uint64_t r = static_cast<uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * span) >> 64);
    return lo + static_cast<int64_t>(r);
  }

  bool bernoulli(double p) { return next_double() < p; }

  /// Gaussian draw via Box-Muller. Consumes exactly two uniforms.
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * kPi * u2);
  }

  /// Child stream keyed by (key, tag). Independent of how many draws have
  /// been taken from the parent, so adding a draw in one pipeline stage
  /// does not reshuffle the randomness of another.
  RngStream fork(uint64_t tag) const {
    return RngStream(detail::hash_combine(key_, tag));
  }

private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

/// Derives the stream for one generated image. The returned stream is a
/// pure function of the four inputs; distinct tuples give independent
/// streams. Impression index 0 is reserved for the master print itself.
inline RngStream derive_rng(uint64_t master_seed, uint64_t subject,
                            FingerClass finger_class, uint64_t impression) {
  uint64_t k = detail::mix64(master_seed + detail::kGamma);
  k = detail::hash_combine(k, subject);
  k = detail::hash_combine(k, static_cast<uint64_t>(finger_class.index()));
  k = detail::hash_combine(k, impression);
  return RngStream(k);
}

}  // namespace fpsynth
