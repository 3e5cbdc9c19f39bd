#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sq {

/// Identifier recorded in bench reports. Streams are reproducible within one
/// build of this library; they are not promised to match other implementations.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/splitmix64-split/v1";

/// SplitMix64 finalizer: a bijective 64-bit mix.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for child stream `stream` of `master` (used for per-repeat projections).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// Seeded generator. Every random component in the library draws from one of these.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on {0, ..., n-1}; n >= 1. Unbiased (rejection sampling).
  std::uint64_t uniform_index(std::uint64_t n);
  /// -1 or +1 with equal probability.
  int random_sign() { return (engine_() >> 63) ? 1 : -1; }
  /// Uniform on [0, 1).
  double uniform01();
  double normal(double mean = 0.0, double stddev = 1.0);
  /// Laplace(0, scale).
  double laplace(double scale = 1.0);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sq
