#pragma once

#include <cstdint>

namespace uplab {

/// Stateless counter-based generator: every draw is a pure function of
/// (seed, counter, stream). Sample i of a Monte Carlo run uses counter i and
/// one stream per coordinate, so batches can be evaluated in any order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept;

  std::uint64_t bits(std::uint64_t counter, std::uint64_t stream) const noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter, std::uint64_t stream) const noexcept;

  /// Standard normal via Box-Muller on streams (2k, 2k+1).
  double normal(std::uint64_t counter, std::uint64_t k) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
};

std::uint64_t mix64(std::uint64_t z) noexcept;

}  // namespace uplab
