#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include "sq/feature_matrix.hpp"

namespace sq {

/// Classes supported on sparse class-specific coordinates, observed in dense
/// Gaussian noise.
///
/// Class supports come from a pool of `support_pool` random coordinates: when
/// the pool holds classes * support coordinates or more, classes take disjoint
/// consecutive slices of it, otherwise each class samples `support` of them.
/// A sample of class c is noise plus amplitude * sign * |Laplace(0, 1)| on c's
/// support. Noise is N(0, noise_sigma^2) per coordinate, scaled by hot_scale on
/// a random hot_fraction of coordinates (off by default).
struct SyntheticSpec {
  std::size_t classes = 10;
  std::size_t dim = 512;
  std::size_t support = 20;
  std::size_t support_pool = 200;
  bool shared_signs = true;  ///< one sign per pool coordinate, shared by all classes
  double amplitude = 1.0;
  double noise_sigma = 1.05;
  double hot_fraction = 0.0;
  double hot_scale = 1.0;
  std::size_t train_per_class = 100;
  std::size_t test_per_class = 100;

  void validate() const;
};

/// (train, test), rows grouped by class in label order. Deterministic given
/// (spec, seed).
std::pair<FeatureMatrix, FeatureMatrix> make_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace sq
