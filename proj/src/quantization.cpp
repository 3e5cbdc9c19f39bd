#include "sq/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <optional>

#include "sq/error.hpp"
#include "sq/parallel.hpp"

namespace sq {

SparsityRatio::SparsityRatio(double ratio) : ratio_(ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw InvalidArgument(fmt::format("sparsity ratio must be in (0, 1], got {}", ratio));
  }
}

std::size_t SparsityRatio::k_for(std::size_t n) const {
  if (n == 0) throw InvalidArgument("sparsity ratio needs a positive dimension");
  const auto k = static_cast<std::size_t>(std::llround(ratio_ * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n);
}

std::vector<std::uint32_t> top_k_support(std::span<const float> x, std::size_t k_sparsity) {
  if (k_sparsity == 0 || k_sparsity > x.size()) {
    throw InvalidArgument(fmt::format("k_sparsity must be in [1, {}], got {}", x.size(), k_sparsity));
  }
  std::vector<std::uint32_t> idx;
  idx.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0f) idx.push_back(static_cast<std::uint32_t>(i));
  }
  if (idx.size() > k_sparsity) {
    const auto before = [&](std::uint32_t a, std::uint32_t b) {
      const float ma = std::abs(x[a]);
      const float mb = std::abs(x[b]);
      return ma > mb || (ma == mb && a < b);
    };
    std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k_sparsity - 1), idx.end(), before);
    idx.resize(k_sparsity);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

Code quantize_ternary(std::span<const float> x, std::size_t k_sparsity) {
  auto idx = top_k_support(x, k_sparsity);
  std::vector<float> vals(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) vals[i] = x[idx[i]] > 0 ? 1.0f : -1.0f;
  return Code(CodeKind::ternary, x.size(), std::move(idx), std::move(vals), k_sparsity);
}

Code quantize_binary(std::span<const float> x, std::size_t k_sparsity) {
  auto idx = top_k_support(x, k_sparsity);
  std::erase_if(idx, [&](std::uint32_t i) { return x[i] < 0; });
  std::vector<float> vals(idx.size(), 1.0f);
  return Code(CodeKind::binary, x.size(), std::move(idx), std::move(vals), k_sparsity);
}

Code quantize_real_sparse(std::span<const float> x, std::size_t k_sparsity) {
  auto idx = top_k_support(x, k_sparsity);
  std::vector<float> vals(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) vals[i] = x[idx[i]];
  return Code(CodeKind::real_sparse, x.size(), std::move(idx), std::move(vals), k_sparsity);
}

Code quantize(CodeKind kind, std::span<const float> x, std::size_t k_sparsity) {
  switch (kind) {
    case CodeKind::ternary: return quantize_ternary(x, k_sparsity);
    case CodeKind::binary: return quantize_binary(x, k_sparsity);
    case CodeKind::real_sparse: return quantize_real_sparse(x, k_sparsity);
  }
  throw InvalidArgument("unknown code kind");
}

std::vector<Code> quantize_rows(CodeKind kind, const FeatureMatrix& m, std::size_t k_sparsity,
                                std::size_t threads) {
  if (m.rows() == 0) return {};
  if (k_sparsity == 0 || k_sparsity > m.cols()) {
    throw InvalidArgument(fmt::format("k_sparsity must be in [1, {}], got {}", m.cols(), k_sparsity));
  }
  std::vector<std::optional<Code>> slots(m.rows());
  parallel_for(m.rows(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) slots[r].emplace(quantize(kind, m.row(r), k_sparsity));
  });
  std::vector<Code> out;
  out.reserve(m.rows());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

FeatureMatrix codes_to_dense(std::span<const Code> codes, const FeatureMatrix* labels_from) {
  const std::size_t dim = codes.empty() ? 0 : codes.front().dim();
  std::vector<float> data(codes.size() * dim, 0.0f);
  for (std::size_t r = 0; r < codes.size(); ++r) {
    const Code& c = codes[r];
    if (c.dim() != dim) throw DimensionMismatch("code dimension", dim, c.dim());
    for (std::size_t i = 0; i < c.nnz(); ++i) data[r * dim + c.indices()[i]] = c.values()[i];
  }
  if (labels_from && labels_from->has_labels()) {
    if (labels_from->rows() != codes.size()) throw DimensionMismatch("label rows", codes.size(), labels_from->rows());
    return FeatureMatrix(codes.size(), dim, std::move(data),
                         {labels_from->labels().begin(), labels_from->labels().end()}, labels_from->label_set());
  }
  return FeatureMatrix(codes.size(), dim, std::move(data));
}

FeatureMatrix codes_to_triplets(std::span<const Code> codes) {
  constexpr std::size_t kExact = std::size_t{1} << 24;
  if (codes.size() > kExact) throw InvalidArgument("too many codes for f32 triplet export");
  std::vector<float> data;
  for (std::size_t r = 0; r < codes.size(); ++r) {
    const Code& c = codes[r];
    if (c.dim() > kExact) throw InvalidArgument("code dimension too large for f32 triplet export");
    for (std::size_t i = 0; i < c.nnz(); ++i) {
      data.push_back(static_cast<float>(r));
      data.push_back(static_cast<float>(c.indices()[i]));
      data.push_back(c.values()[i]);
    }
  }
  const std::size_t rows = data.size() / 3;
  return FeatureMatrix(rows, 3, std::move(data));
}

}  // namespace sq
