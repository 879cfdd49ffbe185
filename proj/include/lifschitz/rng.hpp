#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace lifschitz {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds an ordered list of words into one key. Order matters.
std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) noexcept;

/// Counter-based generator: the stream is a pure function of the key, so a
/// draw keyed by (seed, site) or (seed, sample, path) does not depend on the
/// order in which work items are visited.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
  static CounterRng keyed(std::initializer_list<std::uint64_t> words) noexcept {
    return CounterRng(derive_key(words));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() noexcept { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }
  /// Standard normal (Box–Muller, one value per call).
  double normal() noexcept;
  /// Standard exponential.
  double exponential() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace lifschitz
