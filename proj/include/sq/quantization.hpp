#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sq/code.hpp"
#include "sq/feature_matrix.hpp"

namespace sq {

/// Fraction k/n of coordinates a code may keep, in (0, 1].
class SparsityRatio {
 public:
  explicit SparsityRatio(double ratio);

  double value() const noexcept { return ratio_; }
  /// max(1, round(ratio * n)); n >= 1.
  std::size_t k_for(std::size_t n) const;

 private:
  double ratio_;
};

/// Indices of the `k_sparsity` largest |x_i|, ascending. Ordering is by
/// (|x_i| desc, i asc); exact zeros are never selected, so fewer than
/// `k_sparsity` indices come back when x has fewer nonzeros.
std::vector<std::uint32_t> top_k_support(std::span<const float> x, std::size_t k_sparsity);

/// Signs on the top-k support.
Code quantize_ternary(std::span<const float> x, std::size_t k_sparsity);
/// Ternary code with the -1 entries removed; never re-padded.
Code quantize_binary(std::span<const float> x, std::size_t k_sparsity);
/// Original values on the top-k support.
Code quantize_real_sparse(std::span<const float> x, std::size_t k_sparsity);

Code quantize(CodeKind kind, std::span<const float> x, std::size_t k_sparsity);

/// One code per row of `m`, computed on up to `threads` workers (0 = all cores).
std::vector<Code> quantize_rows(CodeKind kind, const FeatureMatrix& m, std::size_t k_sparsity,
                                std::size_t threads = 1);

/// Dense rows with zeros off the support; labels are taken from `labels_from`
/// when it has them.
FeatureMatrix codes_to_dense(std::span<const Code> codes, const FeatureMatrix* labels_from = nullptr);

/// One (row, index, value) triplet per stored entry, as an nnz x 3 matrix.
/// Row and index are exact in f32 below 2^24.
FeatureMatrix codes_to_triplets(std::span<const Code> codes);

}  // namespace sq
