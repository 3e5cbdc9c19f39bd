#include "sq/code.hpp"

#include <cmath>

#include <fmt/format.h>

#include "sq/error.hpp"

namespace sq {

std::string_view to_string(CodeKind kind) noexcept {
  switch (kind) {
    case CodeKind::ternary: return "TC";
    case CodeKind::binary: return "BC";
    case CodeKind::real_sparse: return "RC";
  }
  return "?";
}

std::optional<CodeKind> parse_code_kind(std::string_view text) noexcept {
  if (text == "TC" || text == "tc" || text == "ternary") return CodeKind::ternary;
  if (text == "BC" || text == "bc" || text == "binary") return CodeKind::binary;
  if (text == "RC" || text == "rc" || text == "real" || text == "real_sparse") {
    return CodeKind::real_sparse;
  }
  return std::nullopt;
}

Code::Code(CodeKind kind, std::size_t dim, std::vector<std::uint32_t> indices,
           std::vector<float> values, std::size_t k_sparsity)
    : kind_(kind),
      dim_(dim),
      indices_(std::move(indices)),
      values_(std::move(values)),
      k_sparsity_(k_sparsity) {
  if (indices_.size() != values_.size()) {
    throw DimensionMismatch("code values", indices_.size(), values_.size());
  }
  if (indices_.size() > k_sparsity_) {
    throw InvalidArgument(
        fmt::format("code has {} entries, above its budget {}", indices_.size(), k_sparsity_));
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= dim_) {
      throw InvalidArgument(fmt::format("code index {} out of range (dim {})", indices_[i], dim_));
    }
    if (i > 0 && indices_[i] <= indices_[i - 1]) {
      throw InvalidArgument("code indices must be strictly increasing");
    }
    const float v = values_[i];
    switch (kind_) {
      case CodeKind::ternary:
        if (v != 1.0f && v != -1.0f) throw InvalidArgument("ternary code value must be +-1");
        break;
      case CodeKind::binary:
        if (v != 1.0f) throw InvalidArgument("binary code value must be +1");
        break;
      case CodeKind::real_sparse:
        if (!std::isfinite(v) || v == 0.0f) {
          throw InvalidArgument("real-sparse code value must be finite and nonzero");
        }
        break;
    }
    squared_norm_ += static_cast<double>(v) * static_cast<double>(v);
  }
}

Code Code::from_dense(std::span<const float> x) {
  std::vector<std::uint32_t> idx;
  std::vector<float> val;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0f) {
      idx.push_back(static_cast<std::uint32_t>(i));
      val.push_back(x[i]);
    }
  }
  return Code(CodeKind::real_sparse, x.size(), std::move(idx), std::move(val), x.size());
}

std::vector<float> Code::to_dense() const {
  std::vector<float> out(dim_, 0.0f);
  for (std::size_t i = 0; i < indices_.size(); ++i) out[indices_[i]] = values_[i];
  return out;
}

bool Code::operator==(const Code& other) const noexcept {
  return kind_ == other.kind_ && dim_ == other.dim_ && k_sparsity_ == other.k_sparsity_ &&
         indices_ == other.indices_ && values_ == other.values_;
}

}  // namespace sq
