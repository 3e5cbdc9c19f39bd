#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "sq/feature_matrix.hpp"

namespace sq {

/// One nonzero of a sparse projection column: R[row][j] = sign.
struct ColumnEntry {
  std::uint32_t row;
  std::int8_t sign;
  bool operator==(const ColumnEntry&) const = default;
};

/// m x n matrix in {0, +-1} with exactly one nonzero per column.
class SparseProjection {
 public:
  SparseProjection(std::size_t m, std::size_t n, std::uint64_t seed,
                   std::vector<ColumnEntry> column_entries);

  std::size_t output_dim() const noexcept { return m_; }
  std::size_t input_dim() const noexcept { return n_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const ColumnEntry> column_entries() const noexcept { return entries_; }

  /// y[row_j] += sign_j * x[j]; O(n).
  std::vector<float> apply(std::span<const float> x) const;

  /// Row-major m x n dense copy (test oracle support and export).
  std::vector<float> densify() const;

  bool operator==(const SparseProjection&) const = default;

 private:
  std::size_t m_;
  std::size_t n_;
  std::uint64_t seed_;
  std::vector<ColumnEntry> entries_;
};

/// Dense m x n matrix with i.i.d. N(0, 1/m) entries, row-major.
class GaussianProjection {
 public:
  GaussianProjection(std::size_t m, std::size_t n, std::uint64_t seed, std::vector<float> data);

  std::size_t output_dim() const noexcept { return m_; }
  std::size_t input_dim() const noexcept { return n_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const float> data() const noexcept { return data_; }

  std::vector<float> apply(std::span<const float> x) const;

  bool operator==(const GaussianProjection&) const = default;

 private:
  std::size_t m_;
  std::size_t n_;
  std::uint64_t seed_;
  std::vector<float> data_;
};

using Projection = std::variant<SparseProjection, GaussianProjection>;

enum class ProjectionKind { none, sparse, gaussian };
std::string_view to_string(ProjectionKind kind) noexcept;
std::optional<ProjectionKind> parse_projection_kind(std::string_view text) noexcept;

/// Each column independently: row uniform on [0, m), sign uniform on {-1, +1}.
SparseProjection make_sparse_projection(std::size_t m, std::size_t n, std::uint64_t seed);
GaussianProjection make_gaussian_projection(std::size_t m, std::size_t n, std::uint64_t seed);
Projection make_projection(ProjectionKind kind, std::size_t m, std::size_t n, std::uint64_t seed);

/// Output dimension for a compression ratio m/n: max(1, round(ratio * n)).
std::size_t projected_dim(std::size_t n, double compression_ratio);

/// y = R x for every row; labels carried over.
FeatureMatrix project(const SparseProjection& p, const FeatureMatrix& m);
FeatureMatrix project(const GaussianProjection& p, const FeatureMatrix& m);
FeatureMatrix project(const Projection& p, const FeatureMatrix& m);

std::size_t output_dim(const Projection& p) noexcept;
std::size_t input_dim(const Projection& p) noexcept;

/// SQPR container (little-endian): "SQPR", u16 version = 1, u8 kind
/// (0 sparse, 1 gaussian), u32 m, u32 n, u64 seed, then either n x (u32 row,
/// i8 sign) or m*n f32.
std::vector<unsigned char> encode_projection(const Projection& p);
Projection decode_projection(std::span<const unsigned char> bytes, std::string_view source = "sqpr");
void save_projection(const Projection& p, const std::filesystem::path& path);
Projection load_projection(const std::filesystem::path& path);

}  // namespace sq
