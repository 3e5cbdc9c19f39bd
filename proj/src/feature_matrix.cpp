#include "sq/feature_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <fmt/format.h>

#include "sq/error.hpp"

namespace sq {

void LabelSet::validate() const {
  if (class_count == 0) throw InvalidArgument("label set: class_count must be >= 1");
  if (!names.empty() && names.size() != class_count) {
    throw InvalidArgument(fmt::format("label set: {} names for {} classes", names.size(),
                                      class_count));
  }
}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<float> data,
                             std::vector<std::uint32_t> labels,
                             std::optional<LabelSet> label_set)
    : rows_(rows), cols_(cols), data_(std::move(data)), labels_(std::move(labels)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionMismatch("feature matrix payload length", rows_ * cols_, data_.size());
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    const float* p = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) {
      if (!std::isfinite(p[c])) {
        throw FormatError(FormatError::Kind::non_finite_value, "feature matrix", r, true,
                          fmt::format("column {}", c));
      }
    }
  }
  if (!labels_.empty() && labels_.size() != rows_) {
    throw DimensionMismatch("feature matrix label count", rows_, labels_.size());
  }
  has_labels_ = !labels_.empty() || (rows_ == 0 && label_set.has_value());
  if (label_set) {
    label_set->validate();
    label_set_ = std::move(*label_set);
  } else if (!labels_.empty()) {
    label_set_.class_count = *std::max_element(labels_.begin(), labels_.end()) + std::size_t{1};
  }
  for (std::size_t r = 0; r < labels_.size(); ++r) {
    if (labels_[r] >= label_set_.class_count) {
      throw FormatError(FormatError::Kind::bad_label, "feature matrix", r, true,
                        fmt::format("label {} >= class count {}", labels_[r],
                                    label_set_.class_count));
    }
  }
}

std::span<const float> FeatureMatrix::row(std::size_t i) const {
  if (i >= rows_) throw InvalidArgument(fmt::format("row {} out of range ({} rows)", i, rows_));
  return {data_.data() + i * cols_, cols_};
}

std::uint32_t FeatureMatrix::label(std::size_t i) const {
  if (labels_.empty()) throw InvalidArgument("feature matrix has no labels");
  return labels_.at(i);
}

FeatureMatrix FeatureMatrix::with_values(std::size_t cols, std::vector<float> data) const {
  std::optional<LabelSet> ls;
  if (has_labels()) ls = label_set_;
  return FeatureMatrix(rows_, cols, std::move(data), labels_, std::move(ls));
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> indices) const {
  std::vector<float> out;
  out.reserve(indices.size() * cols_);
  std::vector<std::uint32_t> labels;
  if (!labels_.empty()) labels.reserve(indices.size());
  for (std::size_t i : indices) {
    auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
    if (!labels_.empty()) labels.push_back(labels_[i]);
  }
  std::optional<LabelSet> ls;
  if (has_labels()) ls = label_set_;
  return FeatureMatrix(indices.size(), cols_, std::move(out), std::move(labels), std::move(ls));
}

FeatureMatrix FeatureMatrix::slice_rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > rows_) {
    throw InvalidArgument(fmt::format("row slice [{}, {}) out of range ({} rows)", begin, end,
                                      rows_));
  }
  std::vector<std::size_t> idx(end - begin);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
  return select_rows(idx);
}

FeatureMatrix FeatureMatrix::with_labels(std::vector<std::uint32_t> labels,
                                         std::optional<LabelSet> label_set) const {
  return FeatureMatrix(rows_, cols_, data_, std::move(labels), std::move(label_set));
}

bool FeatureMatrix::bit_equal(const FeatureMatrix& other) const noexcept {
  return rows_ == other.rows_ && cols_ == other.cols_ && labels_ == other.labels_ &&
         data_.size() == other.data_.size() &&
         (data_.empty() ||
          std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0);
}

}  // namespace sq
