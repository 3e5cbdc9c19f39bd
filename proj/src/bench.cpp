#include "sq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <numeric>

#include "sq/error.hpp"
#include "sq/features.hpp"
#include "sq/quantization.hpp"
#include "sq/rng.hpp"
#include "sq/tensor_io.hpp"

namespace sq {

namespace {

void check_pair(const FeatureMatrix& train, const FeatureMatrix& test) {
  if (!train.has_labels() || !test.has_labels()) throw InvalidArgument("train and test must both be labelled");
  if (train.empty() || test.empty()) throw InvalidArgument("train and test must both be non-empty");
  if (train.cols() != test.cols()) throw DimensionMismatch("test columns", train.cols(), test.cols());
  if (test.class_count() > train.class_count()) {
    for (auto l : test.labels()) {
      if (l >= train.class_count()) {
        throw InvalidArgument(fmt::format("test label {} is outside the train label space (class_count = {})", l,
                                          train.class_count()));
      }
    }
  }
}

struct Stats {
  double mean;
  double std;
};

Stats population_stats(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

const BenchCell* BenchReport::find(ClassifierKind c, CodeKind k, double ratio) const noexcept {
  for (const auto& cell : cells) {
    if (cell.classifier == c && cell.code_kind == k && cell.ratio == ratio) return &cell;
  }
  return nullptr;
}

std::uint64_t repeat_seed(std::uint64_t master, std::size_t r) noexcept { return Rng(master).split(r).seed(); }

BenchReport run_sweep(const SweepConfig& cfg, const FeatureMatrix& train_raw, const FeatureMatrix& test_raw) {
  cfg.validate();
  if (!cfg.seed) throw InvalidArgument("run_sweep needs a resolved seed");
  check_pair(train_raw, test_raw);

  BenchReport report;
  report.config = cfg;
  report.rng_algorithm = std::string(kRngAlgorithm);
  report.train_rows = train_raw.rows();
  report.test_rows = test_raw.rows();
  report.input_dim = train_raw.cols();
  report.class_count = train_raw.class_count();

  const auto stats = features::fit_centering(train_raw);
  const auto train_c = features::apply_centering(train_raw, stats);
  const auto test_c = features::apply_centering(test_raw, stats);

  const std::size_t repeats = cfg.effective_repeats();
  const std::size_t code_dim =
      cfg.projection == ProjectionKind::none ? train_c.cols() : projected_dim(train_c.cols(), cfg.compression_ratio);
  report.code_dim = code_dim;

  for (auto clf : cfg.classifiers) {
    for (auto kind : cfg.code_kinds) {
      for (double ratio : cfg.ratios) {
        BenchCell cell;
        cell.classifier = clf;
        cell.code_kind = kind;
        cell.ratio = ratio;
        cell.k_sparsity = SparsityRatio(ratio).k_for(code_dim);
        report.cells.push_back(cell);
      }
    }
  }
  const bool needs_k = !classes_reach(train_c.labels(), train_c.class_count(), cfg.k_neighbors);
  for (auto& cell : report.cells) {
    if (needs_k && cell.classifier != ClassifierKind::knec) {
      cell.skip_reason = fmt::format("a training class has fewer than k_neighbors = {} exemplars", cfg.k_neighbors);
    }
  }

  const std::vector<std::uint32_t> truth(test_c.labels().begin(), test_c.labels().end());
  const std::vector<std::uint32_t> train_labels(train_c.labels().begin(), train_c.labels().end());
  for (std::size_t r = 0; r < repeats; ++r) {
    FeatureMatrix tr = train_c;
    FeatureMatrix te = test_c;
    if (cfg.projection != ProjectionKind::none) {
      const auto seed = repeat_seed(*cfg.seed, r);
      report.repeat_seeds.push_back(seed);
      const auto p = make_projection(cfg.projection, code_dim, train_c.cols(), seed);
      tr = project(p, train_c);
      te = project(p, test_c);
      const auto pstats = features::fit_centering(tr);
      tr = features::apply_centering(tr, pstats);
      te = features::apply_centering(te, pstats);
    }
    for (auto kind : cfg.code_kinds) {
      for (double ratio : cfg.ratios) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::size_t k = SparsityRatio(ratio).k_for(code_dim);
        auto train_codes = quantize_rows(kind, tr, k, cfg.threads);
        const auto test_codes = quantize_rows(kind, te, k, cfg.threads);
        const double quantize_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto& cell : report.cells) {
          if (cell.code_kind != kind || cell.ratio != ratio || !cell.skip_reason.empty()) continue;
          const auto t1 = std::chrono::steady_clock::now();
          ClassifierParams params{cell.classifier, cfg.k_neighbors, cfg.metric};
          const ClassifierModel model(params, train_codes, train_labels, train_c.class_count());
          const auto preds = classify_batch(model, test_codes, cfg.threads);
          cell.accuracy_per_repeat.push_back(accuracy_percent(preds, truth));
          cell.seconds += quantize_seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
        }
      }
    }
  }
  for (auto& cell : report.cells) {
    if (cell.accuracy_per_repeat.empty()) continue;
    const auto s = population_stats(cell.accuracy_per_repeat);
    cell.accuracy_mean = s.mean;
    cell.accuracy_std = s.std;
  }
  return report;
}

std::pair<FeatureMatrix, FeatureMatrix> split_dataset(const FeatureMatrix& m, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument(fmt::format("split fraction must be in (0, 1), got {}", fraction));
  }
  if (!m.has_labels()) throw InvalidArgument("split_dataset needs labelled rows");
  std::vector<std::vector<std::size_t>> by_class(m.class_count());
  for (std::size_t i = 0; i < m.rows(); ++i) by_class[m.label(i)].push_back(i);
  std::vector<std::size_t> present;
  std::size_t total = 0;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const auto size = by_class[c].size();
    if (size == 0) continue;
    if (size < 2) throw InvalidArgument(fmt::format("class {} has {} sample; a split needs >= 2", c, size));
    present.push_back(c);
    total += size;
  }

  // Largest-remainder apportionment of round(fraction * total) train rows,
  // keeping at least one row of every class on each side.
  const auto quota = [&](std::size_t c) { return fraction * static_cast<double>(by_class[c].size()); };
  std::vector<std::size_t> n_train(by_class.size(), 0);
  std::size_t assigned = 0;
  for (auto c : present) {
    n_train[c] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(quota(c))), 1, by_class[c].size() - 1);
    assigned += n_train[c];
  }
  const auto target = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total))),
                                              present.size(), total - present.size());
  while (assigned != target) {
    const bool grow = assigned < target;
    auto order = present;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ra = quota(a) - static_cast<double>(n_train[a]);
      const double rb = quota(b) - static_cast<double>(n_train[b]);
      return grow ? ra > rb : ra < rb;
    });
    for (auto c : order) {
      if (assigned == target) break;
      if (grow && n_train[c] + 1 < by_class[c].size()) {
        ++n_train[c];
        ++assigned;
      } else if (!grow && n_train[c] > 1) {
        --n_train[c];
        --assigned;
      }
    }
  }

  Rng rng(seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> test_idx;
  for (auto c : present) {
    auto& rows = by_class[c];
    for (std::size_t i = rows.size() - 1; i > 0; --i) std::swap(rows[i], rows[rng.uniform_index(i + 1)]);
    const auto cut = rows.begin() + static_cast<std::ptrdiff_t>(n_train[c]);
    train_idx.insert(train_idx.end(), rows.begin(), cut);
    test_idx.insert(test_idx.end(), cut, rows.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {m.select_rows(train_idx), m.select_rows(test_idx)};
}

std::pair<FeatureMatrix, FeatureMatrix> load_dataset(const SweepConfig& cfg) {
  const auto& ds = cfg.dataset;
  const auto load = [&](const std::filesystem::path& p, const std::filesystem::path& labels) {
    LoadOptions opt;
    opt.csv_labeled = true;
    opt.csv_header = ds.csv_header;
    opt.idx_labels = labels;
    auto m = load_feature_matrix(p, ds.format.value_or(guess_matrix_format(p)), opt);
    if (!m.has_labels()) throw InvalidArgument(fmt::format("{}: bench data must carry labels", p.string()));
    return m;
  };
  switch (ds.source) {
    case DatasetSpec::Source::synthetic:
      if (!cfg.seed && !ds.synthetic_seed) throw InvalidArgument("synthetic dataset needs a seed");
      return make_synthetic(ds.synthetic, ds.synthetic_seed.value_or(*cfg.seed));
    case DatasetSpec::Source::split: {
      if (!cfg.seed) throw InvalidArgument("split dataset needs a seed");
      return split_dataset(load(ds.data, ds.data_labels), ds.split_fraction, *cfg.seed);
    }
    case DatasetSpec::Source::files:
      return {load(ds.train, ds.train_labels), load(ds.test, ds.test_labels)};
  }
  throw InvalidArgument("unknown dataset source");
}

}  // namespace sq
