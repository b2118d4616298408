#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace aep {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Chained mix of the parts, e.g. (seed, m, trajectory).
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t k = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t x : parts) k = mix64(k ^ mix64(x + kGolden));
  return k;
}

// Counter-based generator: draw i is mix64(key + i * golden), so a stream is
// fully determined by its key and position.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return mix64(key_ + (++counter_) * kGolden); }

  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace aep
