#include "uled/rng.hpp"

#include <cmath>
#include <numbers>

namespace uled {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() noexcept {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::gaussian() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  const auto u = static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
  return u < bound ? u : bound - 1;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15ULL));
}

}  // namespace uled
