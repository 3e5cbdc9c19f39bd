#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sq/feature_matrix.hpp"

namespace sq::features {

enum class TransformKind { identity, dct2d, haar2d };

std::optional<TransformKind> parse_transform_kind(std::string_view text) noexcept;

/// How each row is reshaped into a `height x width` image before filtering.
struct TransformSpec {
  TransformKind kind = TransformKind::identity;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t dwt_levels = 1;  ///< haar2d only

  /// Throws DimensionMismatch / InvalidArgument when the spec cannot apply to
  /// rows of length `cols`.
  void validate(std::size_t cols) const;
};

/// Orthonormal DCT-II of one vector.
std::vector<double> dct1d(std::span<const double> x);

/// One orthonormal Haar analysis step: pairwise (a+b)/sqrt2 in the first half,
/// (a-b)/sqrt2 in the second. Length must be even.
std::vector<double> haar1d(std::span<const double> x);

/// Whole-image orthonormal 2D DCT-II (rows, then columns) applied per sample.
FeatureMatrix dct2d(const FeatureMatrix& m, const TransformSpec& spec);
FeatureMatrix inverse_dct2d(const FeatureMatrix& m, const TransformSpec& spec);

/// Multilevel orthonormal 2D Haar decomposition, recursing on the LL band.
FeatureMatrix haar2d(const FeatureMatrix& m, const TransformSpec& spec);
FeatureMatrix inverse_haar2d(const FeatureMatrix& m, const TransformSpec& spec);

/// Dispatches on `spec.kind`.
FeatureMatrix apply_transform(const FeatureMatrix& m, const TransformSpec& spec);

/// Per-dimension means, fit on training rows only.
struct CenteringStats {
  std::vector<double> means;
};

CenteringStats fit_centering(const FeatureMatrix& train);
FeatureMatrix apply_centering(const FeatureMatrix& m, const CenteringStats& stats);

/// Column indices kept by `downsample`: round(i * cols / target_dim) for
/// i = 0..target_dim-1, collisions advanced to the next unused index.
std::vector<std::size_t> downsample_indices(std::size_t cols, std::size_t target_dim);
FeatureMatrix downsample(const FeatureMatrix& m, std::size_t target_dim);

}  // namespace sq::features
