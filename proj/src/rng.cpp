#include "lifschitz/rng.hpp"

#include <cmath>
#include <numbers>

namespace lifschitz {

std::uint64_t derive_key(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto w : words) h = mix64(h ^ mix64(w + 0x9e3779b97f4a7c15ULL));
  return h;
}

double CounterRng::normal() noexcept {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterRng::exponential() noexcept { return -std::log(uniform_open()); }

}  // namespace lifschitz
