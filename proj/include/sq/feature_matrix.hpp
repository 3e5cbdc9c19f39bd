#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sq {

/// Class-index space shared by a dataset's labels.
struct LabelSet {
  std::size_t class_count = 1;
  std::vector<std::string> names;  ///< empty, or exactly class_count entries

  void validate() const;
  bool operator==(const LabelSet&) const = default;
};

/// Dense sample-by-feature matrix of 32-bit floats with optional per-row labels.
///
/// Immutable after construction: every transform returns a new matrix. The
/// constructor enforces the invariants (shape, finiteness, label range), so a
/// FeatureMatrix in hand is always valid.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  /// `data` is row-major, `rows * cols` long. `labels` is either empty or
  /// `rows` long. When `label_set` is omitted and labels are present the class
  /// count is taken as max(label) + 1.
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> data,
                std::vector<std::uint32_t> labels = {},
                std::optional<LabelSet> label_set = std::nullopt);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> row(std::size_t i) const;

  bool has_labels() const noexcept { return has_labels_; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }
  std::uint32_t label(std::size_t i) const;
  const LabelSet& label_set() const noexcept { return label_set_; }
  std::size_t class_count() const noexcept { return label_set_.class_count; }

  /// Same labels, new values. `cols` may differ from this matrix.
  FeatureMatrix with_values(std::size_t cols, std::vector<float> data) const;

  /// Rows at `indices`, in that order, labels carried along.
  FeatureMatrix select_rows(std::span<const std::size_t> indices) const;

  /// Rows [begin, end).
  FeatureMatrix slice_rows(std::size_t begin, std::size_t end) const;

  /// Attaches (or replaces) labels.
  FeatureMatrix with_labels(std::vector<std::uint32_t> labels,
                            std::optional<LabelSet> label_set = std::nullopt) const;

  /// Bitwise comparison of shape, payload and labels.
  bool bit_equal(const FeatureMatrix& other) const noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
  std::vector<std::uint32_t> labels_;
  LabelSet label_set_;
  bool has_labels_ = false;
};

}  // namespace sq
