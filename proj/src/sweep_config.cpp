#include "sq/sweep_config.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <set>
#include <yaml-cpp/yaml.h>

#include "sq/error.hpp"

namespace sq {

namespace {

constexpr std::string_view kKeys[] = {
    "ratios", "code_kinds", "classifiers", "k_neighbors", "metric", "projection",
    "compression_ratio", "projection_repeats", "seed", "threads", "timings",
    "dataset", "data", "split_fraction", "train", "test", "data_labels", "train_labels",
    "test_labels", "format", "csv_header",
    "synthetic_seed", "synthetic_classes", "synthetic_dim", "synthetic_support",
    "synthetic_support_pool", "synthetic_shared_signs", "synthetic_amplitude",
    "synthetic_noise_sigma", "synthetic_hot_fraction", "synthetic_hot_scale",
    "synthetic_train_per_class", "synthetic_test_per_class",
};

class Reader {
 public:
  Reader(std::string_view source, std::filesystem::path base) : source_(source), base_(std::move(base)) {}

  [[noreturn]] void fail(const YAML::Node& node, std::string_view key, std::string_view detail) const {
    throw InvalidArgument(fmt::format("{}:{}: key '{}': {}", source_, node.Mark().line + 1, key, detail));
  }

  template <typename T>
  T scalar(const YAML::Node& node, std::string_view key, std::string_view expected) const {
    if (!node.IsScalar()) fail(node, key, fmt::format("expected {}", expected));
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, key, fmt::format("expected {}, got '{}'", expected, node.Scalar()));
    }
  }

  std::size_t count(const YAML::Node& node, std::string_view key) const {
    const auto v = scalar<long long>(node, key, "a non-negative integer");
    if (v < 0) fail(node, key, "must be non-negative");
    return static_cast<std::size_t>(v);
  }

  std::uint64_t u64(const YAML::Node& node, std::string_view key) const {
    if (node.IsScalar() && !node.Scalar().empty() && node.Scalar().front() == '-') {
      fail(node, key, "must be non-negative");
    }
    return scalar<std::uint64_t>(node, key, "an unsigned 64-bit integer");
  }

  std::filesystem::path path(const YAML::Node& node, std::string_view key) const {
    std::filesystem::path p = scalar<std::string>(node, key, "a path");
    return p.is_relative() && !base_.empty() ? base_ / p : p;
  }

  template <typename T, typename Parse>
  std::vector<T> list(const YAML::Node& node, std::string_view key, std::string_view what, Parse parse) const {
    std::vector<YAML::Node> items;
    if (node.IsSequence()) {
      for (const auto& n : node) items.push_back(n);
    } else {
      items.push_back(node);
    }
    std::vector<T> out;
    for (const auto& n : items) {
      const auto text = scalar<std::string>(n, key, what);
      const auto v = parse(text);
      if (!v) fail(n, key, fmt::format("'{}' is not {}", text, what));
      out.push_back(*v);
    }
    return out;
  }

 private:
  std::string_view source_;
  std::filesystem::path base_;
};

std::optional<double> parse_double(const std::string& s) {
  try {
    return YAML::Node(s).as<double>();
  } catch (const YAML::Exception&) {
    return std::nullopt;
  }
}

template <typename T>
void require_unique(const std::vector<T>& v, std::string_view what) {
  std::set<T> seen(v.begin(), v.end());
  if (seen.size() != v.size()) throw InvalidArgument(fmt::format("{} contains duplicates", what));
}

}  // namespace

std::string_view to_string(DatasetSpec::Source s) noexcept {
  switch (s) {
    case DatasetSpec::Source::synthetic: return "synthetic";
    case DatasetSpec::Source::split: return "split";
    case DatasetSpec::Source::files: return "files";
  }
  return "?";
}

std::vector<double> SweepConfig::default_ratios() {
  std::vector<double> r;
  for (int i = 1; i <= 10; ++i) r.push_back(i / 10.0);
  return r;
}

std::size_t SweepConfig::effective_repeats() const noexcept {
  return projection == ProjectionKind::none ? 1 : projection_repeats;
}

void SweepConfig::validate() const {
  if (ratios.empty()) throw InvalidArgument("ratios must not be empty");
  for (double r : ratios) {
    if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument(fmt::format("ratio {} is outside (0, 1]", r));
  }
  require_unique(ratios, "ratios");
  if (code_kinds.empty()) throw InvalidArgument("code_kinds must not be empty");
  require_unique(code_kinds, "code_kinds");
  if (classifiers.empty()) throw InvalidArgument("classifiers must not be empty");
  require_unique(classifiers, "classifiers");
  if (k_neighbors == 0) throw InvalidArgument("k_neighbors must be >= 1");
  if (!(compression_ratio > 0.0 && compression_ratio <= 1.0)) {
    throw InvalidArgument(fmt::format("compression_ratio {} is outside (0, 1]", compression_ratio));
  }
  if (projection_repeats == 0) throw InvalidArgument("projection_repeats must be >= 1");
  switch (dataset.source) {
    case DatasetSpec::Source::synthetic:
      dataset.synthetic.validate();
      break;
    case DatasetSpec::Source::split:
      if (dataset.data.empty()) throw InvalidArgument("dataset 'split' needs a 'data' path");
      if (!(dataset.split_fraction > 0.0 && dataset.split_fraction < 1.0)) {
        throw InvalidArgument(fmt::format("split_fraction {} is outside (0, 1)", dataset.split_fraction));
      }
      break;
    case DatasetSpec::Source::files:
      if (dataset.train.empty() || dataset.test.empty()) {
        throw InvalidArgument("dataset 'files' needs both 'train' and 'test' paths");
      }
      break;
  }
}

std::vector<std::string_view> sweep_config_keys() { return {std::begin(kKeys), std::end(kKeys)}; }

SweepConfig parse_sweep_config(std::string_view text, const std::filesystem::path& base_dir,
                               std::string_view source) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw InvalidArgument(fmt::format("{}:{}: {}", source, e.mark.line + 1, e.msg));
  }
  SweepConfig cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) throw InvalidArgument(fmt::format("{}: expected a key: value mapping", source));

  const Reader rd(source, base_dir);
  std::optional<DatasetSpec::Source> explicit_source;
  auto& ds = cfg.dataset;
  auto& syn = ds.synthetic;
  std::set<std::string> seen;
  for (const auto& item : root) {
    const auto key = item.first.as<std::string>();
    const YAML::Node& v = item.second;
    if (!seen.insert(key).second) rd.fail(item.first, key, "duplicate key");
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      rd.fail(item.first, key, "unknown key");
    }
    if (key == "ratios") {
      cfg.ratios = rd.list<double>(v, key, "a number", parse_double);
    } else if (key == "code_kinds") {
      cfg.code_kinds = rd.list<CodeKind>(v, key, "a code kind (RC, TC, BC)",
                                         [](const std::string& s) { return parse_code_kind(s); });
    } else if (key == "classifiers") {
      cfg.classifiers = rd.list<ClassifierKind>(v, key, "a classifier (knn, knec, lsc)",
                                                [](const std::string& s) { return parse_classifier_kind(s); });
    } else if (key == "k_neighbors") {
      cfg.k_neighbors = rd.count(v, key);
    } else if (key == "metric") {
      const auto m = parse_metric(rd.scalar<std::string>(v, key, "a metric"));
      if (!m) rd.fail(v, key, "expected cosine, dot or euclidean");
      cfg.metric = *m;
    } else if (key == "projection") {
      const auto p = parse_projection_kind(rd.scalar<std::string>(v, key, "a projection kind"));
      if (!p) rd.fail(v, key, "expected none, sparse or gaussian");
      cfg.projection = *p;
    } else if (key == "compression_ratio") {
      cfg.compression_ratio = rd.scalar<double>(v, key, "a number");
    } else if (key == "projection_repeats") {
      cfg.projection_repeats = rd.count(v, key);
    } else if (key == "seed") {
      cfg.seed = rd.u64(v, key);
    } else if (key == "threads") {
      cfg.threads = rd.count(v, key);
    } else if (key == "timings") {
      cfg.timings = rd.scalar<bool>(v, key, "true or false");
    } else if (key == "dataset") {
      const auto s = rd.scalar<std::string>(v, key, "a dataset source");
      if (s == "synthetic") {
        explicit_source = DatasetSpec::Source::synthetic;
      } else if (s == "split") {
        explicit_source = DatasetSpec::Source::split;
      } else if (s == "files") {
        explicit_source = DatasetSpec::Source::files;
      } else {
        rd.fail(v, key, "expected synthetic, split or files");
      }
    } else if (key == "data") {
      ds.data = rd.path(v, key);
    } else if (key == "split_fraction") {
      ds.split_fraction = rd.scalar<double>(v, key, "a number");
    } else if (key == "train") {
      ds.train = rd.path(v, key);
    } else if (key == "test") {
      ds.test = rd.path(v, key);
    } else if (key == "data_labels") {
      ds.data_labels = rd.path(v, key);
    } else if (key == "train_labels") {
      ds.train_labels = rd.path(v, key);
    } else if (key == "test_labels") {
      ds.test_labels = rd.path(v, key);
    } else if (key == "format") {
      const auto f = parse_matrix_format(rd.scalar<std::string>(v, key, "a matrix format"));
      if (!f) rd.fail(v, key, "expected sqfm, idx or csv");
      ds.format = *f;
    } else if (key == "csv_header") {
      ds.csv_header = rd.scalar<bool>(v, key, "true or false");
    } else if (key == "synthetic_seed") {
      ds.synthetic_seed = rd.u64(v, key);
    } else if (key == "synthetic_classes") {
      syn.classes = rd.count(v, key);
    } else if (key == "synthetic_dim") {
      syn.dim = rd.count(v, key);
    } else if (key == "synthetic_support") {
      syn.support = rd.count(v, key);
    } else if (key == "synthetic_support_pool") {
      syn.support_pool = rd.count(v, key);
    } else if (key == "synthetic_shared_signs") {
      syn.shared_signs = rd.scalar<bool>(v, key, "true or false");
    } else if (key == "synthetic_amplitude") {
      syn.amplitude = rd.scalar<double>(v, key, "a number");
    } else if (key == "synthetic_noise_sigma") {
      syn.noise_sigma = rd.scalar<double>(v, key, "a number");
    } else if (key == "synthetic_hot_fraction") {
      syn.hot_fraction = rd.scalar<double>(v, key, "a number");
    } else if (key == "synthetic_hot_scale") {
      syn.hot_scale = rd.scalar<double>(v, key, "a number");
    } else if (key == "synthetic_train_per_class") {
      syn.train_per_class = rd.count(v, key);
    } else if (key == "synthetic_test_per_class") {
      syn.test_per_class = rd.count(v, key);
    }
  }
  if (explicit_source) {
    ds.source = *explicit_source;
  } else if (!ds.data.empty()) {
    ds.source = DatasetSpec::Source::split;
  } else if (!ds.train.empty() || !ds.test.empty()) {
    ds.source = DatasetSpec::Source::files;
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return parse_sweep_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                            path.parent_path(), path.string());
}

}  // namespace sq
