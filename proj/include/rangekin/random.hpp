#pragma once

#include <cstdint>
#include <random>

namespace rangekin {

/// SplitMix64 finalizer; used to derive independent sub-stream keys.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Splittable, stateless random stream identified by a 64-bit key.
///
/// A stream never advances; callers derive a child for every independent
/// consumer (trial, sensor, measurement type) and draw from its engine. Child
/// keys are `key ^ splitmix64(index)` re-mixed, so results depend only on the
/// path of indices and not on evaluation order or thread assignment.
class RandomStream {
 public:
  explicit constexpr RandomStream(std::uint64_t seed) noexcept : key_(splitmix64(seed)) {}

  constexpr RandomStream child(std::uint64_t index) const noexcept {
    return RandomStream(Key{splitmix64(key_ ^ splitmix64(index))});
  }

  std::mt19937_64 engine() const { return std::mt19937_64(key_); }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  struct Key {
    std::uint64_t value;
  };
  explicit constexpr RandomStream(Key k) noexcept : key_(k.value) {}

  std::uint64_t key_;
};

}  // namespace rangekin
