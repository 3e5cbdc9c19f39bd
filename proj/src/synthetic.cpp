#include "sq/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>
#include <vector>

#include "sq/error.hpp"
#include "sq/rng.hpp"

namespace sq {

namespace {

/// First `count` entries of a Fisher-Yates shuffle of [0, n).
std::vector<std::uint32_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t count) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0u);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(v[i], v[j]);
  }
  v.resize(count);
  return v;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (classes == 0 || dim == 0 || support == 0) throw InvalidArgument("synthetic spec needs classes, dim, support >= 1");
  if (support_pool < support || support_pool > dim) {
    throw InvalidArgument(fmt::format("support_pool must be in [support, dim] = [{}, {}], got {}", support, dim, support_pool));
  }
  if (!(amplitude > 0) || !(noise_sigma >= 0) || !(hot_scale > 0) || !(hot_fraction >= 0 && hot_fraction <= 1)) {
    throw InvalidArgument("synthetic spec has an out-of-range scale parameter");
  }
  if (train_per_class == 0 || test_per_class == 0) throw InvalidArgument("synthetic spec needs samples per class >= 1");
}

std::pair<FeatureMatrix, FeatureMatrix> make_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  const std::size_t n = spec.dim;
  const auto pool = sample_without_replacement(rng, n, spec.support_pool);
  std::vector<float> pool_sign(n);
  for (auto& s : pool_sign) s = static_cast<float>(rng.random_sign());

  std::vector<std::vector<std::uint32_t>> support(spec.classes);
  std::vector<std::vector<float>> sign(spec.classes);
  const bool disjoint = spec.support_pool >= spec.classes * spec.support;
  for (std::size_t c = 0; c < spec.classes; ++c) {
    std::vector<std::uint32_t> picks(spec.support);
    if (disjoint) {
      std::iota(picks.begin(), picks.end(), static_cast<std::uint32_t>(c * spec.support));
    } else {
      picks = sample_without_replacement(rng, spec.support_pool, spec.support);
    }
    for (auto p : picks) {
      const std::uint32_t coord = pool[p];
      support[c].push_back(coord);
      sign[c].push_back(spec.shared_signs ? pool_sign[coord] : static_cast<float>(rng.random_sign()));
    }
  }

  std::vector<double> scale(n, spec.noise_sigma);
  const auto hot_count = static_cast<std::size_t>(std::llround(spec.hot_fraction * static_cast<double>(n)));
  for (auto h : sample_without_replacement(rng, n, hot_count)) scale[h] *= spec.hot_scale;

  const auto draw = [&](std::size_t per_class) {
    const std::size_t rows = per_class * spec.classes;
    std::vector<float> data(rows * n);
    std::vector<std::uint32_t> labels(rows);
    std::size_t r = 0;
    for (std::size_t c = 0; c < spec.classes; ++c) {
      for (std::size_t s = 0; s < per_class; ++s, ++r) {
        float* x = data.data() + r * n;
        for (std::size_t j = 0; j < n; ++j) x[j] = static_cast<float>(rng.normal(0.0, scale[j]));
        for (std::size_t t = 0; t < spec.support; ++t) {
          x[support[c][t]] += static_cast<float>(spec.amplitude * sign[c][t] * std::abs(rng.laplace(1.0)));
        }
        labels[r] = static_cast<std::uint32_t>(c);
      }
    }
    return FeatureMatrix(rows, n, std::move(data), std::move(labels), LabelSet{spec.classes, {}});
  };
  auto train = draw(spec.train_per_class);
  auto test = draw(spec.test_per_class);
  return {std::move(train), std::move(test)};
}

}  // namespace sq
