#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sq/code.hpp"
#include "sq/feature_matrix.hpp"

namespace sq {

enum class Metric : std::uint8_t { cosine, dot, euclidean };
enum class ClassifierKind : std::uint8_t { knn, knec, lsc };

std::string_view to_string(Metric m) noexcept;
std::string_view to_string(ClassifierKind k) noexcept;
std::optional<Metric> parse_metric(std::string_view text) noexcept;
std::optional<ClassifierKind> parse_classifier_kind(std::string_view text) noexcept;

/// Dot and cosine are similarities; euclidean is a distance. Dot products
/// accumulate in double in ascending index order; cosine is 0 when either norm
/// is 0; euclidean is sqrt(max(0, |a|^2 + |b|^2 - 2 a.b)).
double similarity(const Code& a, const Code& b, Metric metric);
double similarity(std::span<const float> a, std::span<const float> b, Metric metric);

/// Higher-is-better form of a similarity: euclidean distances are negated.
double score_of(double similarity, Metric metric) noexcept;

struct ClassifierParams {
  ClassifierKind kind = ClassifierKind::knec;
  std::size_t k_neighbors = 5;
  /// Neighbour ranking for all kinds; LSC always measures its residual in
  /// Euclidean norm regardless.
  Metric metric = Metric::cosine;
};

struct Prediction {
  std::uint32_t label = 0;
  std::vector<double> per_class_score;
  bool operator==(const Prediction&) const = default;
};

/// Index of the largest score, lowest index on ties.
std::uint32_t argmax_lowest(std::span<const double> scores) noexcept;

/// Exemplar set plus classifier settings. Immutable after construction.
class ClassifierModel {
 public:
  /// Exemplar i has label labels[i] < class_count. Throws InvalidArgument when
  /// k_neighbors is 0, the set is empty, a class is empty (knec, lsc), or a
  /// class has fewer than k_neighbors exemplars (lsc).
  ClassifierModel(ClassifierParams params, std::vector<Code> exemplars,
                  std::vector<std::uint32_t> labels, std::size_t class_count);

  /// Every row of a labelled matrix becomes a real-sparse exemplar.
  static ClassifierModel from_dense(ClassifierParams params, const FeatureMatrix& m);

  const ClassifierParams& params() const noexcept { return params_; }
  std::size_t class_count() const noexcept { return class_count_; }
  std::size_t size() const noexcept { return exemplars_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const Code> exemplars() const noexcept { return exemplars_; }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }
  /// Exemplar indices of class c, ascending.
  std::span<const std::size_t> members(std::uint32_t c) const { return members_.at(c); }
  std::size_t min_class_size() const noexcept;

 private:
  ClassifierParams params_;
  std::vector<Code> exemplars_;
  std::vector<std::uint32_t> labels_;
  std::size_t class_count_;
  std::size_t dim_ = 0;
  std::vector<std::vector<std::size_t>> members_;
};

/// True when every class has at least `k` exemplars.
bool classes_reach(std::span<const std::uint32_t> labels, std::size_t class_count, std::size_t k);

/// Positions of the `k` highest scores among `candidates`, ordered by
/// (score desc, candidate position asc). `k` is clamped to candidates.size().
std::vector<std::size_t> select_top(std::span<const double> scores, std::size_t k);

/// Euclidean distance from q to the span of `columns` (each of q's length),
/// via SVD with singular values below 1e-8 * sigma_max treated as zero.
double subspace_residual(std::span<const double> q, std::span<const std::vector<double>> columns);

Prediction knn_classify(const ClassifierModel& model, const Code& query);
Prediction knec_classify(const ClassifierModel& model, const Code& query);
Prediction lsc_classify(const ClassifierModel& model, const Code& query);

/// Dispatches on model.params().kind.
Prediction classify(const ClassifierModel& model, const Code& query);
Prediction classify(const ClassifierModel& model, std::span<const float> query);

/// Same decision rules as classify(); similarities come from a blocked matrix
/// product, so real-valued scores may differ from classify() in the last bits
/// (integer-valued codes agree exactly). Queries are sharded over `threads`.
std::vector<Prediction> classify_batch(const ClassifierModel& model, std::span<const Code> queries,
                                       std::size_t threads = 1);

/// Percent of predictions equal to truth.
double accuracy_percent(std::span<const Prediction> predictions, std::span<const std::uint32_t> truth);

}  // namespace sq
