#pragma once

/// @file rng.hpp
/// PCG32 (XSH-RR 64/32) generator used by every stochastic component.
///
/// A run owns exactly one generator, derived from (master seed, stream), so
/// runs are reproducible bit for bit and never share state.

#include <cstdint>

namespace umda {

class Pcg32 {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kDefaultState = 0x853c49e6748fea9bULL;
  static constexpr std::uint64_t kDefaultIncrement = 0xda3e39cb94b95bdbULL;

  /// Unseeded generator with the reference default state.
  Pcg32() noexcept = default;

  /// Reference seeding: `initstate` selects the starting point, `initseq`
  /// the stream (any value; the increment is `(initseq << 1) | 1`).
  Pcg32(std::uint64_t initstate, std::uint64_t initseq) noexcept {
    state_ = 0U;
    increment_ = (initseq << 1U) | 1U;
    next_u32();
    state_ += initstate;
    next_u32();
  }

  std::uint32_t next_u32() noexcept {
    const std::uint64_t old = state_;
    state_ = old * kMultiplier + increment_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18U) ^ old) >> 27U);
    const auto rot = static_cast<std::uint32_t>(old >> 59U);
    return (xorshifted >> rot) | (xorshifted << ((32U - rot) & 31U));
  }

  /// Uniform integer in [0, bound) without modulo bias (reference rejection
  /// scheme). `bound` must be positive.
  std::uint32_t bounded(std::uint32_t bound) noexcept {
    const std::uint32_t threshold = (0U - bound) % bound;
    for (;;) {
      const std::uint32_t r = next_u32();
      if (r >= threshold) return r % bound;
    }
  }

  /// next_u32() / 2^32, a value in [0, 1) on a 2^-32 grid.
  double uniform01() noexcept { return next_u32() * 0x1.0p-32; }

  /// Uniform in (0, 1] with 53 bits of resolution; consumes two outputs.
  double uniform_open_closed() noexcept {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    const std::uint64_t bits = ((hi << 32U) | lo) >> 11U;
    return static_cast<double>(bits + 1U) * 0x1.0p-53;
  }

  /// Returns true with probability p, using uniform01() < p. Throws
  /// ContractViolation unless 0 <= p <= 1.
  bool bernoulli(double p);

  std::uint64_t state() const noexcept { return state_; }
  std::uint64_t increment() const noexcept { return increment_; }

  friend bool operator==(const Pcg32&, const Pcg32&) = default;

 private:
  std::uint64_t state_ = kDefaultState;
  std::uint64_t increment_ = kDefaultIncrement;
};

/// Generator for one run: seed(master_seed, stream).
inline Pcg32 seed(std::uint64_t master_seed, std::uint64_t stream) noexcept {
  return Pcg32(master_seed, stream);
}

/// splitmix64 finalizer; used to turn structured ids into stream selectors.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

/// Stream selector for run `run_index` of setting `setting` (e.g. lambda or n).
/// Depends only on its two arguments, so adding settings to a sweep leaves
/// existing streams untouched.
constexpr std::uint64_t derive_stream(std::uint64_t setting, std::uint64_t run_index) noexcept {
  return mix64(mix64(setting) ^ (run_index + 0x632be59bd9b4e019ULL));
}

}  // namespace umda
