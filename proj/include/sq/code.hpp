#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sq {

/// TC, BC and RC in the tables: ternary {-1,0,+1}, binary {0,1}, and real
/// values on the ternary support.
enum class CodeKind : std::uint8_t { ternary, binary, real_sparse };

std::string_view to_string(CodeKind kind) noexcept;  ///< "TC", "BC", "RC"
std::optional<CodeKind> parse_code_kind(std::string_view text) noexcept;

/// A quantized sample: sorted sparse (index, value) entries over `dim`.
///
/// Only constructible through the validating constructor, so entries are
/// always strictly increasing, in range, and value-constrained per kind
/// (ternary: +-1, binary: +1, real_sparse: finite and nonzero).
class Code {
 public:
  Code(CodeKind kind, std::size_t dim, std::vector<std::uint32_t> indices,
       std::vector<float> values, std::size_t k_sparsity);

  /// Real-sparse code holding every nonzero of `x` (k_sparsity = dim).
  static Code from_dense(std::span<const float> x);

  CodeKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t k_sparsity() const noexcept { return k_sparsity_; }
  std::size_t nnz() const noexcept { return indices_.size(); }
  std::span<const std::uint32_t> indices() const noexcept { return indices_; }
  std::span<const float> values() const noexcept { return values_; }

  /// Sum of squared values, accumulated in double in index order.
  double squared_norm() const noexcept { return squared_norm_; }

  std::vector<float> to_dense() const;

  bool operator==(const Code& other) const noexcept;

 private:
  CodeKind kind_;
  std::size_t dim_;
  std::vector<std::uint32_t> indices_;
  std::vector<float> values_;
  std::size_t k_sparsity_;
  double squared_norm_ = 0.0;
};

}  // namespace sq
