// One line per acceptance criterion; exit status is nonzero if any fails.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "properties.hpp"
#include "sq/bench.hpp"
#include "sq/classifiers.hpp"
#include "sq/cli.hpp"
#include "sq/features.hpp"
#include "sq/projection.hpp"
#include "sq/quantization.hpp"
#include "sq/synthetic.hpp"
#include "sq/tensor_io.hpp"

#ifndef SQ_DATA_DIR
#define SQ_DATA_DIR "data"
#endif

using namespace sq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::vector<double> sweep_ratios() { return SweepConfig::default_ratios(); }

Outcome quantization_oracle() {
  std::mt19937_64 g(101);
  std::size_t checked = 0;
  for (int v = 0; v < 1000; ++v) {
    const auto x = testing_support::laplace_vector(g, 128);
    for (double r : {0.1, 0.3, 0.5, 1.0}) {
      const std::size_t k = SparsityRatio(r).k_for(x.size());
      const auto support = oracle::top_k(x, k);
      const auto t = quantize_ternary(x, k);
      const auto b = quantize_binary(x, k);
      const auto rc = quantize_real_sparse(x, k);
      std::vector<std::uint32_t> pos;
      std::vector<float> signs;
      std::vector<float> vals;
      for (auto i : support) {
        if (x[i] > 0) pos.push_back(i);
        signs.push_back(x[i] > 0 ? 1.0f : -1.0f);
        vals.push_back(x[i]);
      }
      const auto same = [](auto a, const auto& b) { return std::equal(a.begin(), a.end(), b.begin(), b.end()); };
      if (!same(t.indices(), support) || !same(t.values(), signs) || !same(rc.indices(), support) ||
          !same(rc.values(), vals) || !same(b.indices(), pos) ||
          !std::all_of(b.values().begin(), b.values().end(), [](float f) { return f == 1.0f; })) {
        return {false, fmt::format("vector {} ratio {} differs from the sort oracle", v, r)};
      }
      checked += 3;
    }
  }
  return {true, fmt::format("{} codes identical to the sort oracle", checked)};
}

Outcome projection_oracle() {
  std::mt19937_64 g(202);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto p = make_sparse_projection(32, 256, 1000 + s);
    std::vector<std::pair<std::uint32_t, int>> cols;
    for (const auto& e : p.column_entries()) cols.emplace_back(e.row, e.sign);
    const auto x = testing_support::normal_vector(g, 256);
    const auto ref = oracle::sparse_project(cols, 32, x);
    const auto y = p.apply(x);
    const auto projected = project(p, FeatureMatrix(1, 256, x));
    const auto batch = projected.row(0);
    double scale = 0.0;
    for (double v : ref) scale = std::max(scale, std::fabs(v));
    for (std::size_t i = 0; i < 32; ++i) {
      worst = std::max(worst, std::fabs(y[i] - ref[i]) / scale);
      worst = std::max(worst, std::fabs(batch[i] - ref[i]) / scale);
    }
  }
  return {worst <= 1e-5, fmt::format("max relative error {:.2e} over 100 projections (tol 1e-5)", worst)};
}

Outcome lsc_oracle() {
  std::mt19937_64 g(303);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_int_distribution<int> small(-2, 2);
  double worst = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    std::vector<std::vector<double>> cols(3, std::vector<double>(16));
    std::vector<double> q(16);
    for (auto& v : q) v = nd(g);
    const bool deficient = inst < 10;
    for (std::size_t c = 0; c < 3; ++c)
      for (auto& v : cols[c]) v = deficient ? small(g) : nd(g);
    if (deficient) {
      // rank 2 (or 1 for every fifth) by construction
      for (std::size_t t = 0; t < 16; ++t) cols[2][t] = (inst % 5 == 0 ? 0.0 : 2.0 * cols[0][t]) - cols[1][t];
      if (inst % 5 == 0) cols[1] = cols[0];
    }
    const double got = subspace_residual(q, cols);
    const double want = oracle::lsc_residual(q, cols);
    worst = std::max(worst, std::fabs(got - want));
  }
  return {worst <= 1e-6, fmt::format("max abs residual error {:.2e} over 50 instances, 10 rank-deficient (tol 1e-6)", worst)};
}

Outcome classifier_oracle() {
  std::mt19937_64 g(404);
  std::size_t queries = 0;
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t dim = 12;
    std::vector<std::vector<float>> ex;
    std::vector<std::uint32_t> labels;
    std::vector<Code> codes;
    for (std::uint32_t c = 0; c < 3; ++c) {
      for (int i = 0; i < 20; ++i) {
        ex.push_back(testing_support::ternary_vector(g, dim, 0.3));
        codes.push_back(Code::from_dense(ex.back()));
        labels.push_back(c);
      }
    }
    std::vector<Code> qcodes;
    std::vector<std::vector<float>> qs;
    for (int q = 0; q < 50; ++q) {
      qs.push_back(testing_support::ternary_vector(g, dim, 0.3));
      qcodes.push_back(Code::from_dense(qs.back()));
    }
    for (auto kind : {ClassifierKind::knn, ClassifierKind::knec}) {
      const ClassifierModel model({kind, 5, Metric::cosine}, codes, labels, 3);
      const auto batch = classify_batch(model, qcodes, 1);
      for (std::size_t q = 0; q < qs.size(); ++q) {
        const auto want = kind == ClassifierKind::knn ? oracle::knn(ex, labels, 3, qs[q], 5)
                                                      : oracle::knec(ex, labels, 3, qs[q], 5).first;
        if (classify(model, qcodes[q]).label != want || batch[q].label != want) {
          return {false, fmt::format("{} instance {} query {}: oracle says {}", to_string(kind), inst, q, want)};
        }
        ++queries;
      }
    }
  }
  return {true, fmt::format("{} kNN/kNEC predictions identical to the full-sort oracle", queries)};
}

/// Mean accuracy per (kind, ratio) over seeds 0..9 on the default synthetic set.
std::map<std::pair<CodeKind, double>, double> synthetic_means(ProjectionKind projection,
                                                              std::vector<CodeKind> kinds) {
  std::map<std::pair<CodeKind, double>, double> sum;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    const auto [train, test] = make_synthetic(SyntheticSpec{}, static_cast<std::uint64_t>(s));
    SweepConfig cfg;
    cfg.code_kinds = kinds;
    cfg.classifiers = {ClassifierKind::knec};
    cfg.projection = projection;
    cfg.compression_ratio = 0.5;
    cfg.projection_repeats = 5;
    cfg.seed = static_cast<std::uint64_t>(s);
    for (const auto& cell : run_sweep(cfg, train, test).cells) sum[{cell.code_kind, cell.ratio}] += *cell.accuracy_mean / seeds;
  }
  return sum;
}

Outcome quantization_gain() {
  const auto m = synthetic_means(ProjectionKind::none, {CodeKind::real_sparse, CodeKind::ternary});
  const double rc_full = m.at({CodeKind::real_sparse, 1.0});
  double rc_interior = 0.0;
  double rc_best = 0.0;
  double tc_best = 0.0;
  double tc_best_ratio = 0.0;
  for (double r : sweep_ratios()) {
    const double rc = m.at({CodeKind::real_sparse, r});
    if (r >= 0.2 - 1e-9 && r <= 0.6 + 1e-9) rc_interior = std::max(rc_interior, rc);
    rc_best = std::max(rc_best, rc);
    if (m.at({CodeKind::ternary, r}) > tc_best) {
      tc_best = m.at({CodeKind::ternary, r});
      tc_best_ratio = r;
    }
  }
  const bool snr_ok = rc_full >= 60.0 && rc_full <= 85.0;
  const bool gain_ok = rc_interior - rc_full >= 2.0;
  const bool tc_ok = tc_best >= rc_best - 2.0;
  return {snr_ok && gain_ok && tc_ok,
          fmt::format("RC@1.0 {:.2f} (60-85: {}), best interior RC {:.2f} gain {:+.2f} (>=2: {}), "
                      "best TC {:.2f} at {:.1f} vs best RC {:.2f} (within 2: {})",
                      rc_full, snr_ok ? "ok" : "no", rc_interior, rc_interior - rc_full, gain_ok ? "ok" : "no",
                      tc_best, tc_best_ratio, rc_best, tc_ok ? "ok" : "no")};
}

Outcome mnist_check() {
  const std::filesystem::path dir = SQ_DATA_DIR "/mnist";
  LoadOptions opt;
  opt.idx_labels = dir / "labels-idx1-ubyte.gz";
  const auto all = load_feature_matrix(dir / "images-idx3-ubyte.gz", MatrixFormat::idx, opt);
  features::TransformSpec spec;
  spec.kind = features::TransformKind::dct2d;
  spec.height = 28;
  spec.width = 28;
  const auto train = features::dct2d(all.slice_rows(0, 5000), spec);
  const auto test = features::dct2d(all.slice_rows(5000, 6000), spec);
  SweepConfig cfg;
  cfg.ratios = {0.3, 1.0};
  cfg.code_kinds = {CodeKind::real_sparse, CodeKind::ternary};
  cfg.classifiers = {ClassifierKind::knec};
  cfg.seed = 0;
  const auto r = run_sweep(cfg, train, test);
  const double rc1 = *r.find(ClassifierKind::knec, CodeKind::real_sparse, 1.0)->accuracy_mean;
  const double rc3 = *r.find(ClassifierKind::knec, CodeKind::real_sparse, 0.3)->accuracy_mean;
  const double tc3 = *r.find(ClassifierKind::knec, CodeKind::ternary, 0.3)->accuracy_mean;
  return {rc1 >= 90.0 && tc3 >= rc3 - 3.0,
          fmt::format("RC@1.0 {:.2f} (>=90), TC@0.3 {:.2f} vs RC@0.3 {:.2f} (within 3)", rc1, tc3, rc3)};
}

Outcome projection_contrast() {
  const auto sparse = synthetic_means(ProjectionKind::sparse, {CodeKind::ternary});
  const auto gauss = synthetic_means(ProjectionKind::gaussian, {CodeKind::ternary});
  double best = -1.0;
  double best_ratio = 0.0;
  for (double r : sweep_ratios()) {
    if (sparse.at({CodeKind::ternary, r}) > best) {
      best = sparse.at({CodeKind::ternary, r});
      best_ratio = r;
    }
  }
  const double g = gauss.at({CodeKind::ternary, best_ratio});
  return {best >= g, fmt::format("sparse TC best {:.2f} at {:.1f}, Gaussian TC there {:.2f}", best, best_ratio, g)};
}

Outcome determinism() {
  testing_support::TempDir dir;
  {
    std::ofstream f(dir / "sweep.yaml");
    f << "seed: 2024\nprojection: sparse\nprojection_repeats: 3\nclassifiers: [knn, knec, lsc]\n"
         "synthetic_train_per_class: 30\nsynthetic_test_per_class: 30\n";
  }
  std::ostringstream sink;
  for (const char* name : {"a.json", "b.json"}) {
    const int code = cli::run({"bench", "--config", (dir / "sweep.yaml").string(), "--out", (dir / name).string()},
                              sink, sink);
    if (code != 0) return {false, fmt::format("bench exited {}: {}", code, sink.str())};
  }
  const auto a = read_file_bytes(dir / "a.json");
  const auto b = read_file_bytes(dir / "b.json");
  return {a == b && !a.empty(), fmt::format("{} and {} bytes, {}", a.size(), b.size(), a == b ? "identical" : "differ")};
}

Outcome invariant_suite() {
  std::size_t passed = 0;
  std::string failures;
  const auto props = properties::all();
  for (const auto& p : props) {
    const auto why = p.run();
    if (why.empty()) {
      ++passed;
    } else {
      failures += fmt::format("; {}/{}: {}", p.module, p.name, why);
    }
  }
  return {passed == props.size(), fmt::format("{}/{} properties hold{}", passed, props.size(), failures)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "quantization oracle equivalence", 5, quantization_oracle},
      {2, "projection oracle equivalence", 5, projection_oracle},
      {3, "LSC solver oracle", 5, lsc_oracle},
      {4, "classifier oracle equivalence", 10, classifier_oracle},
      {5, "synthetic quantization gain", 120, quantization_gain},
      {6, "MNIST DCT desk-scale check", 120, mnist_check},
      {7, "sparse vs Gaussian projection", 180, projection_contrast},
      {8, "report determinism", 60, determinism},
      {9, "invariant suite", 60, invariant_suite},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    fmt::print("[{}] {} {}: {} ({:.1f} s, limit {:.0f} s{})\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail, secs,
               c.limit_seconds, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
