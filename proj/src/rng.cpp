#include "sq/rng.hpp"

#include <cmath>
#include <limits>

#include "sq/error.hpp"

namespace sq {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) + stream);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("uniform_index needs n >= 1");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal(double mean, double stddev) { return mean + stddev * normal_(engine_); }

double Rng::laplace(double scale) {
  // Inverse CDF on u in (-1/2, 1/2).
  double u;
  do {
    u = uniform01() - 0.5;
  } while (u == -0.5);
  return -scale * (u < 0 ? -1.0 : 1.0) * std::log1p(-2.0 * std::abs(u));
}

}  // namespace sq
