#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sq/feature_matrix.hpp"
#include "sq/sweep_config.hpp"

namespace sq {

/// One (classifier, code kind, ratio) entry of a sweep.
struct BenchCell {
  ClassifierKind classifier = ClassifierKind::knec;
  CodeKind code_kind = CodeKind::real_sparse;
  double ratio = 1.0;
  std::size_t k_sparsity = 0;
  /// Empty when the cell was skipped (see skip_reason).
  std::vector<double> accuracy_per_repeat;
  std::optional<double> accuracy_mean;
  std::optional<double> accuracy_std;  ///< population std over repeats
  std::string skip_reason;
  double seconds = 0.0;
};

struct BenchReport {
  SweepConfig config;  ///< seed resolved
  std::string rng_algorithm;
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
  std::size_t input_dim = 0;
  std::size_t code_dim = 0;  ///< projected dimension, or input_dim
  std::size_t class_count = 0;
  std::vector<std::uint64_t> repeat_seeds;  ///< empty without projection
  std::vector<BenchCell> cells;             ///< classifier-major, then code kind, then ratio, in config order

  const BenchCell* find(ClassifierKind c, CodeKind k, double ratio) const noexcept;
};

/// Seed of projection repeat `r`.
std::uint64_t repeat_seed(std::uint64_t master, std::size_t r) noexcept;

/// center(train stats) -> [project with a fresh matrix per repeat -> re-center]
/// -> quantize -> fit on train codes -> percent correct on test.
///
/// kNN and LSC cells are skipped when a training class has fewer than
/// k_neighbors exemplars. `cfg.seed` must be set.
BenchReport run_sweep(const SweepConfig& cfg, const FeatureMatrix& train, const FeatureMatrix& test);

/// Stratified split: round(fraction * rows) train rows apportioned to classes
/// by largest remainder, so each class is within one row of its exact share
/// and keeps at least one row on each side. Row order is preserved.
std::pair<FeatureMatrix, FeatureMatrix> split_dataset(const FeatureMatrix& m, double fraction, std::uint64_t seed);

/// Materializes cfg.dataset.
std::pair<FeatureMatrix, FeatureMatrix> load_dataset(const SweepConfig& cfg);

enum class ReportFormat { csv, json };
std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept;

std::string report_csv(const BenchReport& r);
/// Fixed 4-decimal floats, fixed key order; byte-identical for identical
/// inputs unless timings are enabled.
std::string report_json(const BenchReport& r);
void emit_report(const BenchReport& r, ReportFormat format, const std::filesystem::path& path);

}  // namespace sq
