#pragma once

#include <cstdint>

namespace uled {

/// SplitMix64 stream. The exact recurrence is part of the fixture contract so
/// that generated frames are reproducible in any language:
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// uniform() = (next() >> 11) * 2^-53, in [0, 1).
/// gaussian() consumes two uniforms u1, u2 (in that order) and returns
/// sqrt(-2 ln(1 - u1)) * cos(2 pi u2); no value is cached between calls.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept;
  double uniform() noexcept;
  double gaussian() noexcept;
  /// Uniform integer in [0, bound) by multiply-shift on the top 53 bits.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t state_;
};

/// The SplitMix64 finalizer applied to a single value.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Independent stream seed for sub-stream `stream` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace uled
