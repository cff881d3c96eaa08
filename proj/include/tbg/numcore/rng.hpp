//
// Copyright 2026 The tbg Authors
// SPDX-License-Identifier: Apache-2.0
//
#ifndef TBG_NUMCORE_RNG_HPP
#define TBG_NUMCORE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace tbg::numcore {

// splitmix64; used for seed expansion and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with explicit, serializable state. All randomness in the
// project flows through this type so results are reproducible across
// platforms and independent of the standard library's distributions.
class Rng {
 public:
  // State is the four generator words plus the Box-Muller cache.
  struct State {
    std::array<std::uint64_t, 4> s{};
    double cached = 0.0;
    bool has_cached = false;
  };

  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_.s) w = splitmix64(sm);
  }

  // Counter-based stream derivation: stream(root, i) and stream(root, j)
  // are statistically independent generators for i != j. Used to give each
  // sample / chain / worker item its own generator so output is identical
  // at any worker count.
  static Rng stream(std::uint64_t root_seed, std::uint64_t index) {
    std::uint64_t sm = root_seed;
    const std::uint64_t a = splitmix64(sm);
    sm = a ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return Rng(splitmix64(sm));
  }

  std::uint64_t next_u64() {
    auto& s = state_.s;
    const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Lemire-style rejection-free enough at desk scale; use plain modulo of
    // a 64-bit draw only when n is tiny relative to 2^64 (always true here).
    return next_u64() % n;
  }

  // Standard normal via Marsaglia polar; second value cached.
  double normal() {
    if (state_.has_cached) {
      state_.has_cached = false;
      return state_.cached;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    state_.cached = v * f;
    state_.has_cached = true;
    return u * f;
  }

  const State& state() const { return state_; }
  void restore(const State& s) { state_ = s; }

 private:
  explicit Rng() = default;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  State state_;
};

}  // namespace tbg::numcore

#endif  // TBG_NUMCORE_RNG_HPP
