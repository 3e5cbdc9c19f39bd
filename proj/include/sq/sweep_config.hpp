#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sq/classifiers.hpp"
#include "sq/code.hpp"
#include "sq/projection.hpp"
#include "sq/synthetic.hpp"
#include "sq/tensor_io.hpp"

namespace sq {

/// Where a sweep's samples come from.
struct DatasetSpec {
  enum class Source { synthetic, split, files };

  Source source = Source::synthetic;
  SyntheticSpec synthetic;
  std::optional<std::uint64_t> synthetic_seed;  ///< defaults to the sweep seed
  std::filesystem::path data;   ///< split: one labelled file
  double split_fraction = 0.9;  ///< split: train share per class
  std::filesystem::path train;  ///< files
  std::filesystem::path test;   ///< files
  std::filesystem::path data_labels;
  std::filesystem::path train_labels;
  std::filesystem::path test_labels;
  std::optional<MatrixFormat> format;  ///< guessed from each extension when unset
  bool csv_header = false;
};

std::string_view to_string(DatasetSpec::Source s) noexcept;

/// Everything that determines a sweep's result. Defaults reproduce the table
/// layout: ratios 0.1..1.0, all three code kinds, kNEC and LSC, k = 5, cosine.
struct SweepConfig {
  std::vector<double> ratios = default_ratios();
  std::vector<CodeKind> code_kinds{CodeKind::real_sparse, CodeKind::ternary, CodeKind::binary};
  std::vector<ClassifierKind> classifiers{ClassifierKind::knec, ClassifierKind::lsc};
  std::size_t k_neighbors = 5;
  Metric metric = Metric::cosine;
  ProjectionKind projection = ProjectionKind::none;
  double compression_ratio = 0.5;
  std::size_t projection_repeats = 5;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;  ///< 0 = all cores
  bool timings = false;     ///< include wall-clock seconds in JSON (breaks byte-determinism)
  DatasetSpec dataset;

  static std::vector<double> default_ratios();

  /// Number of projection draws actually used: 1 without projection.
  std::size_t effective_repeats() const noexcept;

  /// Throws InvalidArgument naming the first violated constraint.
  void validate() const;
};

/// Parses a flat YAML mapping; unknown keys and wrong types are rejected with
/// the offending key and line. Relative paths resolve against `base_dir`.
SweepConfig parse_sweep_config(std::string_view text, const std::filesystem::path& base_dir = {},
                               std::string_view source = "config");
SweepConfig load_sweep_config(const std::filesystem::path& path);

/// Keys accepted by parse_sweep_config, in documentation order.
std::vector<std::string_view> sweep_config_keys();

}  // namespace sq
