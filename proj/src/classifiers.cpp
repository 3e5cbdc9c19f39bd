#include "sq/classifiers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "sq/error.hpp"
#include "sq/parallel.hpp"

namespace sq {

namespace {

constexpr double kRankTolerance = 1e-8;
constexpr std::size_t kQueryBlock = 128;

double finish(double dot, double na, double nb, Metric metric) noexcept {
  switch (metric) {
    case Metric::dot: return dot;
    case Metric::cosine: return (na == 0.0 || nb == 0.0) ? 0.0 : dot / (std::sqrt(na) * std::sqrt(nb));
    case Metric::euclidean: return std::sqrt(std::max(0.0, na + nb - 2.0 * dot));
  }
  return 0.0;
}

/// Sum over the exemplar's entries in index order; identical to the sparse
/// merge because entries off the query support contribute exact zeros.
double gather_dot(const Code& e, std::span<const double> q) noexcept {
  double acc = 0.0;
  const auto idx = e.indices();
  const auto val = e.values();
  for (std::size_t i = 0; i < idx.size(); ++i) acc += static_cast<double>(val[i]) * q[idx[i]];
  return acc;
}

std::vector<double> densify(const Code& c) {
  std::vector<double> q(c.dim(), 0.0);
  for (std::size_t i = 0; i < c.nnz(); ++i) q[c.indices()[i]] = c.values()[i];
  return q;
}

void check_query(const ClassifierModel& model, const Code& query) {
  if (query.dim() != model.dim()) throw DimensionMismatch("query dimension", model.dim(), query.dim());
}

/// Scores (higher is better) of every exemplar against one query.
std::vector<double> exemplar_scores(const ClassifierModel& model, const Code& query) {
  const auto q = densify(query);
  const Metric metric = model.params().metric;
  const auto ex = model.exemplars();
  std::vector<double> s(ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) {
    s[i] = score_of(finish(gather_dot(ex[i], q), ex[i].squared_norm(), query.squared_norm(), metric), metric);
  }
  return s;
}

Prediction decide_knn(const ClassifierModel& model, std::span<const double> scores) {
  Prediction p;
  p.per_class_score.assign(model.class_count(), 0.0);
  for (std::size_t pos : select_top(scores, model.params().k_neighbors)) {
    p.per_class_score[model.labels()[pos]] += 1.0;
  }
  p.label = argmax_lowest(p.per_class_score);
  return p;
}

Prediction decide_knec(const ClassifierModel& model, std::span<const double> scores) {
  Prediction p;
  p.per_class_score.assign(model.class_count(), 0.0);
  std::vector<double> local;
  for (std::uint32_t c = 0; c < model.class_count(); ++c) {
    const auto mem = model.members(c);
    local.resize(mem.size());
    for (std::size_t i = 0; i < mem.size(); ++i) local[i] = scores[mem[i]];
    double sum = 0.0;
    for (std::size_t pos : select_top(local, model.params().k_neighbors)) sum += local[pos];
    p.per_class_score[c] = sum;
  }
  p.label = argmax_lowest(p.per_class_score);
  return p;
}

Prediction decide_lsc(const ClassifierModel& model, std::span<const double> scores, const Code& query) {
  Prediction p;
  p.per_class_score.assign(model.class_count(), 0.0);
  const auto q = densify(query);
  std::vector<double> local;
  std::vector<std::vector<double>> cols;
  for (std::uint32_t c = 0; c < model.class_count(); ++c) {
    const auto mem = model.members(c);
    local.resize(mem.size());
    for (std::size_t i = 0; i < mem.size(); ++i) local[i] = scores[mem[i]];
    cols.clear();
    for (std::size_t pos : select_top(local, model.params().k_neighbors)) {
      cols.push_back(densify(model.exemplars()[mem[pos]]));
    }
    p.per_class_score[c] = -subspace_residual(q, cols);
  }
  p.label = argmax_lowest(p.per_class_score);
  return p;
}

Prediction decide(const ClassifierModel& model, std::span<const double> scores, const Code& query) {
  switch (model.params().kind) {
    case ClassifierKind::knn: return decide_knn(model, scores);
    case ClassifierKind::knec: return decide_knec(model, scores);
    case ClassifierKind::lsc: return decide_lsc(model, scores, query);
  }
  throw InvalidArgument("unknown classifier kind");
}

void require_kind(const ClassifierModel& model, ClassifierKind kind) {
  if (model.params().kind != kind) {
    throw InvalidArgument(fmt::format("model is {}, not {}", to_string(model.params().kind), to_string(kind)));
  }
}

}  // namespace

std::string_view to_string(Metric m) noexcept {
  switch (m) {
    case Metric::cosine: return "cosine";
    case Metric::dot: return "dot";
    case Metric::euclidean: return "euclidean";
  }
  return "?";
}

std::string_view to_string(ClassifierKind k) noexcept {
  switch (k) {
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::knec: return "knec";
    case ClassifierKind::lsc: return "lsc";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view text) noexcept {
  if (text == "cosine") return Metric::cosine;
  if (text == "dot") return Metric::dot;
  if (text == "euclidean") return Metric::euclidean;
  return std::nullopt;
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view text) noexcept {
  if (text == "knn") return ClassifierKind::knn;
  if (text == "knec") return ClassifierKind::knec;
  if (text == "lsc") return ClassifierKind::lsc;
  return std::nullopt;
}

double similarity(const Code& a, const Code& b, Metric metric) {
  if (a.dim() != b.dim()) throw DimensionMismatch("code dimension", a.dim(), b.dim());
  const auto ia = a.indices();
  const auto ib = b.indices();
  double dot = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ia.size() && j < ib.size()) {
    if (ia[i] < ib[j]) {
      ++i;
    } else if (ib[j] < ia[i]) {
      ++j;
    } else {
      dot += static_cast<double>(a.values()[i]) * static_cast<double>(b.values()[j]);
      ++i;
      ++j;
    }
  }
  return finish(dot, a.squared_norm(), b.squared_norm(), metric);
}

double similarity(std::span<const float> a, std::span<const float> b, Metric metric) {
  if (a.size() != b.size()) throw DimensionMismatch("vector length", a.size(), b.size());
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0f && b[i] == 0.0f) continue;
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  return finish(dot, na, nb, metric);
}

double score_of(double similarity, Metric metric) noexcept {
  return metric == Metric::euclidean ? -similarity : similarity;
}

std::uint32_t argmax_lowest(std::span<const double> scores) noexcept {
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

ClassifierModel::ClassifierModel(ClassifierParams params, std::vector<Code> exemplars,
                                 std::vector<std::uint32_t> labels, std::size_t class_count)
    : params_(params), exemplars_(std::move(exemplars)), labels_(std::move(labels)), class_count_(class_count) {
  if (params_.k_neighbors == 0) throw InvalidArgument("k_neighbors must be >= 1");
  if (exemplars_.empty()) throw InvalidArgument("classifier needs at least one exemplar");
  if (labels_.size() != exemplars_.size()) throw DimensionMismatch("exemplar labels", exemplars_.size(), labels_.size());
  if (class_count_ == 0) throw InvalidArgument("class_count must be >= 1");
  dim_ = exemplars_.front().dim();
  members_.assign(class_count_, {});
  for (std::size_t i = 0; i < exemplars_.size(); ++i) {
    if (exemplars_[i].dim() != dim_) throw DimensionMismatch("exemplar dimension", dim_, exemplars_[i].dim());
    if (labels_[i] >= class_count_) {
      throw InvalidArgument(fmt::format("exemplar {} has label {} but class_count = {}", i, labels_[i], class_count_));
    }
    members_[labels_[i]].push_back(i);
  }
  if (params_.kind != ClassifierKind::knn) {
    for (std::size_t c = 0; c < class_count_; ++c) {
      if (members_[c].empty()) {
        throw InvalidArgument(fmt::format("class {} has no exemplars ({} needs every class)", c, to_string(params_.kind)));
      }
    }
  }
  if (params_.kind == ClassifierKind::lsc && min_class_size() < params_.k_neighbors) {
    throw InvalidArgument(fmt::format("lsc needs every class to have >= k_neighbors = {} exemplars; smallest has {}",
                                      params_.k_neighbors, min_class_size()));
  }
}

ClassifierModel ClassifierModel::from_dense(ClassifierParams params, const FeatureMatrix& m) {
  if (!m.has_labels()) throw InvalidArgument("exemplar matrix has no labels");
  std::vector<Code> codes;
  codes.reserve(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) codes.push_back(Code::from_dense(m.row(r)));
  return ClassifierModel(params, std::move(codes), {m.labels().begin(), m.labels().end()}, m.class_count());
}

std::size_t ClassifierModel::min_class_size() const noexcept {
  std::size_t best = members_.empty() ? 0 : members_.front().size();
  for (const auto& m : members_) best = std::min(best, m.size());
  return best;
}

bool classes_reach(std::span<const std::uint32_t> labels, std::size_t class_count, std::size_t k) {
  std::vector<std::size_t> counts(class_count, 0);
  for (auto l : labels) {
    if (l < class_count) ++counts[l];
  }
  return std::all_of(counts.begin(), counts.end(), [&](std::size_t n) { return n >= k; });
}

std::vector<std::size_t> select_top(std::span<const double> scores, std::size_t k) {
  std::vector<std::size_t> pos(scores.size());
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  k = std::min(k, pos.size());
  const auto before = [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::partial_sort(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(k), pos.end(), before);
  pos.resize(k);
  return pos;
}

double subspace_residual(std::span<const double> q, std::span<const std::vector<double>> columns) {
  const auto n = static_cast<Eigen::Index>(q.size());
  const Eigen::Map<const Eigen::VectorXd> qv(q.data(), n);
  if (columns.empty()) return qv.norm();
  Eigen::MatrixXd e(n, static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != q.size()) throw DimensionMismatch("subspace column", q.size(), columns[j].size());
    e.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::VectorXd>(columns[j].data(), n);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return qv.norm();
  const double cutoff = kRankTolerance * sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  const auto u = svd.matrixU().leftCols(rank);
  const Eigen::VectorXd r = qv - u * (u.transpose() * qv);
  return r.norm();
}

Prediction knn_classify(const ClassifierModel& model, const Code& query) {
  require_kind(model, ClassifierKind::knn);
  return classify(model, query);
}

Prediction knec_classify(const ClassifierModel& model, const Code& query) {
  require_kind(model, ClassifierKind::knec);
  return classify(model, query);
}

Prediction lsc_classify(const ClassifierModel& model, const Code& query) {
  require_kind(model, ClassifierKind::lsc);
  return classify(model, query);
}

Prediction classify(const ClassifierModel& model, const Code& query) {
  check_query(model, query);
  return decide(model, exemplar_scores(model, query), query);
}

Prediction classify(const ClassifierModel& model, std::span<const float> query) {
  return classify(model, Code::from_dense(query));
}

std::vector<Prediction> classify_batch(const ClassifierModel& model, std::span<const Code> queries,
                                       std::size_t threads) {
  for (const auto& q : queries) check_query(model, q);
  const auto ex = model.exemplars();
  const auto n_ex = static_cast<Eigen::Index>(ex.size());
  const auto dim = static_cast<Eigen::Index>(model.dim());
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(dim, n_ex);
  for (Eigen::Index i = 0; i < n_ex; ++i) {
    const Code& c = ex[static_cast<std::size_t>(i)];
    for (std::size_t t = 0; t < c.nnz(); ++t) e(c.indices()[t], i) = c.values()[t];
  }
  const Metric metric = model.params().metric;
  std::vector<Prediction> out(queries.size());
  const std::size_t blocks = (queries.size() + kQueryBlock - 1) / kQueryBlock;
  parallel_for(blocks, threads, [&](std::size_t b0, std::size_t b1) {
    Eigen::MatrixXd qm;
    Eigen::MatrixXd dots;
    std::vector<double> scores(ex.size());
    for (std::size_t b = b0; b < b1; ++b) {
      const std::size_t first = b * kQueryBlock;
      const std::size_t count = std::min(kQueryBlock, queries.size() - first);
      qm.setZero(dim, static_cast<Eigen::Index>(count));
      for (std::size_t j = 0; j < count; ++j) {
        const Code& c = queries[first + j];
        for (std::size_t t = 0; t < c.nnz(); ++t) qm(c.indices()[t], static_cast<Eigen::Index>(j)) = c.values()[t];
      }
      dots.noalias() = qm.transpose() * e;
      for (std::size_t j = 0; j < count; ++j) {
        const Code& q = queries[first + j];
        for (std::size_t i = 0; i < ex.size(); ++i) {
          const double d = dots(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
          scores[i] = score_of(finish(d, ex[i].squared_norm(), q.squared_norm(), metric), metric);
        }
        out[first + j] = decide(model, scores, q);
      }
    }
  });
  return out;
}

double accuracy_percent(std::span<const Prediction> predictions, std::span<const std::uint32_t> truth) {
  if (predictions.size() != truth.size()) throw DimensionMismatch("prediction count", truth.size(), predictions.size());
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predictions[i].label == truth[i] ? 1 : 0;
  return 100.0 * static_cast<double>(hit) / static_cast<double>(truth.size());
}

}  // namespace sq
