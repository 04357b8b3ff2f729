#include "uplab/rng.hpp"

#include <cmath>
#include <numbers>

namespace uplab {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed) noexcept
    : seed_(seed), key_(mix64(seed + 0x632BE59BD9B4E019ULL)) {}

std::uint64_t CounterRng::bits(std::uint64_t counter,
                               std::uint64_t stream) const noexcept {
  std::uint64_t z = mix64(counter * 0x9E3779B97F4A7C15ULL + key_);
  z = mix64(z ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  return mix64(z + key_);
}

double CounterRng::uniform(std::uint64_t counter,
                           std::uint64_t stream) const noexcept {
  return static_cast<double>(bits(counter, stream) >> 11) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t counter, std::uint64_t k) const noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform(counter, 2 * k);
  const double u2 = uniform(counter, 2 * k + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace uplab
