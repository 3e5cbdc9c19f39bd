#include <doctest.h>

#include "sq/error.hpp"
#include "sq/sweep_config.hpp"

using namespace sq;

TEST_CASE("empty config gives the documented defaults") {
  const auto c = parse_sweep_config("");
  CHECK(c.ratios.size() == 10);
  CHECK(c.ratios.front() == 0.1);
  CHECK(c.ratios.back() == 1.0);
  CHECK(c.code_kinds.size() == 3);
  CHECK(c.classifiers == std::vector<ClassifierKind>{ClassifierKind::knec, ClassifierKind::lsc});
  CHECK(c.k_neighbors == 5);
  CHECK(c.metric == Metric::cosine);
  CHECK(c.projection == ProjectionKind::none);
  CHECK(c.compression_ratio == 0.5);
  CHECK(c.projection_repeats == 5);
  CHECK(c.effective_repeats() == 1);
  CHECK_FALSE(c.seed.has_value());
  CHECK(c.dataset.source == DatasetSpec::Source::synthetic);
}

TEST_CASE("all keys parse") {
  const auto c = parse_sweep_config(R"(
# comment
ratios: [0.2, 0.5]
code_kinds: [TC, rc]
classifiers: knn
k_neighbors: 3
metric: dot
projection: gaussian
compression_ratio: 0.25
projection_repeats: 2
seed: 18446744073709551615
threads: 2
timings: true
synthetic_classes: 4
synthetic_dim: 64
synthetic_support: 8
synthetic_support_pool: 16
synthetic_shared_signs: false
synthetic_amplitude: 2.5
synthetic_noise_sigma: 0.7
synthetic_hot_fraction: 0.2
synthetic_hot_scale: 3
synthetic_train_per_class: 11
synthetic_test_per_class: 12
synthetic_seed: 9
)");
  CHECK(c.ratios == std::vector<double>{0.2, 0.5});
  CHECK(c.code_kinds == std::vector<CodeKind>{CodeKind::ternary, CodeKind::real_sparse});
  CHECK(c.classifiers == std::vector<ClassifierKind>{ClassifierKind::knn});
  CHECK(c.metric == Metric::dot);
  CHECK(c.projection == ProjectionKind::gaussian);
  CHECK(c.effective_repeats() == 2);
  CHECK(*c.seed == 18446744073709551615ULL);
  CHECK(c.timings);
  CHECK(c.dataset.synthetic.support_pool == 16);
  CHECK_FALSE(c.dataset.synthetic.shared_signs);
  CHECK(c.dataset.synthetic.hot_scale == 3.0);
  CHECK(*c.dataset.synthetic_seed == 9);
}

TEST_CASE("file datasets resolve relative paths against the config directory") {
  const auto c = parse_sweep_config("train: a/train.sqfm\ntest: /abs/test.sqfm\nformat: sqfm\n", "/cfg");
  CHECK(c.dataset.source == DatasetSpec::Source::files);
  CHECK(c.dataset.train == std::filesystem::path("/cfg/a/train.sqfm"));
  CHECK(c.dataset.test == std::filesystem::path("/abs/test.sqfm"));
  const auto s = parse_sweep_config("data: d-idx3-ubyte.gz\ndata_labels: l-idx1-ubyte.gz\nsplit_fraction: 0.5\n");
  CHECK(s.dataset.source == DatasetSpec::Source::split);
  CHECK(s.dataset.split_fraction == 0.5);
}

TEST_CASE("schema violations name the key and line") {
  const auto message = [](std::string_view text) {
    try {
      parse_sweep_config(text, {}, "sweep.yaml");
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string("accepted");
  };
  CHECK(message("ratio: 0.5\n").find("sweep.yaml:1: key 'ratio': unknown key") != std::string::npos);
  CHECK(message("seed: 1\nk_neighbors: many\n").find(":2: key 'k_neighbors'") != std::string::npos);
  CHECK(message("ratios: [0.5, 1.5]\n").find("outside (0, 1]") != std::string::npos);
  CHECK(message("code_kinds: [XC]\n").find("'XC'") != std::string::npos);
  CHECK(message("seed: -4\n").find("non-negative") != std::string::npos);
  CHECK(message("projection_repeats: 0\n").find("projection_repeats") != std::string::npos);
  CHECK(message("dataset: files\ntrain: x\n").find("'test'") != std::string::npos);
  CHECK(message("- 1\n- 2\n").find("mapping") != std::string::npos);
  CHECK(message("ratios: [0.5, 0.5]\n").find("duplicates") != std::string::npos);
  CHECK(message("a: [\n").find("sweep.yaml") != std::string::npos);
}

TEST_CASE("bundled sweep config matches the library defaults") {
  const auto c = load_sweep_config(std::filesystem::path(SQ_SOURCE_DIR) / "configs" / "sweep.yaml");
  const SweepConfig d;
  CHECK(c.ratios == d.ratios);
  CHECK(c.code_kinds == d.code_kinds);
  CHECK(c.classifiers == d.classifiers);
  CHECK(*c.seed == 7);
  const SyntheticSpec s;
  CHECK(c.dataset.synthetic.support_pool == s.support_pool);
  CHECK(c.dataset.synthetic.amplitude == s.amplitude);
  CHECK(c.dataset.synthetic.noise_sigma == s.noise_sigma);
}
