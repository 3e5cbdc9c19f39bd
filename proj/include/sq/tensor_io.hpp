#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sq/feature_matrix.hpp"

namespace sq {

enum class MatrixFormat { sqfm, idx, csv };

std::optional<MatrixFormat> parse_matrix_format(std::string_view text) noexcept;

/// Picks a format from the file name: `.csv`, `.sqfm`, and anything that looks
/// like an IDX file (`-ubyte`, `.idx*`, optionally `.gz`). Defaults to SQFM.
MatrixFormat guess_matrix_format(const std::filesystem::path& path);

struct LoadOptions {
  bool csv_labeled = false;  ///< last CSV column is an integer class label
  bool csv_header = false;   ///< skip the first CSV line
  std::filesystem::path idx_labels;  ///< optional IDX1 label file paired with IDX images
};

/// SQFM layout (little-endian): "SQFM", u16 version = 1, u32 rows, u32 cols,
/// u8 flags (bit 0: labels present), rows*cols f32 payload, then rows u32
/// labels when flagged.
inline constexpr std::size_t kSqfmHeaderBytes = 15;
inline constexpr std::uint16_t kSqfmVersion = 1;

struct SqfmHeader {
  std::uint16_t version = kSqfmVersion;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  bool has_labels = false;
};

FeatureMatrix load_feature_matrix(const std::filesystem::path& path, MatrixFormat format,
                                  const LoadOptions& options = {});

/// Writes SQFM atomically (temp file + rename). load(save(m)) is bit-exact.
void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path);

std::vector<unsigned char> encode_sqfm(const FeatureMatrix& m);
FeatureMatrix decode_sqfm(std::span<const unsigned char> bytes, std::string_view source = "sqfm");
SqfmHeader decode_sqfm_header(std::span<const unsigned char> bytes,
                              std::string_view source = "sqfm");
SqfmHeader read_sqfm_header(const std::filesystem::path& path);

/// IDX (big-endian dims, any standard element type). Dimensions after the
/// first are flattened row-major into columns. Gzip-compressed files are
/// decompressed transparently.
FeatureMatrix decode_idx(std::span<const unsigned char> bytes, std::string_view source = "idx");
std::vector<std::uint32_t> load_idx_labels(const std::filesystem::path& path);

FeatureMatrix parse_csv(std::string_view text, const LoadOptions& options,
                        std::string_view source = "csv");

/// Whole-file read; gzip streams are inflated when `inflate_gzip` is set.
std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path,
                                           bool inflate_gzip = false);

/// Writes to a sibling temp file then renames over `path`, so a failed write
/// never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::span<const unsigned char> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace sq
