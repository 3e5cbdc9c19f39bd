#include "sq/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "sq/bench.hpp"
#include "sq/classifiers.hpp"
#include "sq/error.hpp"
#include "sq/features.hpp"
#include "sq/projection.hpp"
#include "sq/quantization.hpp"
#include "sq/rng.hpp"
#include "sq/tensor_io.hpp"

namespace sq::cli {

namespace {

struct InputArgs {
  std::string path;
  std::string format;
  std::string labels;
  bool csv_labeled = false;
  bool csv_header = false;

  void add_to(CLI::App* app, const std::string& flag, const std::string& what) {
    app->add_option(flag, path, what)->required()->check(CLI::ExistingFile);
    app->add_option("--format", format, "sqfm | idx | csv (default: from extension)");
    app->add_option("--labels", labels, "IDX1 label file for IDX input")->check(CLI::ExistingFile);
    app->add_flag("--csv-labeled", csv_labeled, "last CSV column is the class label");
    app->add_flag("--csv-header", csv_header, "skip the first CSV line");
  }

  FeatureMatrix load() const { return load_path(path); }

  FeatureMatrix load_path(const std::string& p) const {
    LoadOptions opt{csv_labeled, csv_header, labels};
    return load_feature_matrix(p, resolve_format(p), opt);
  }

  MatrixFormat resolve_format(const std::string& p) const {
    if (format.empty()) return guess_matrix_format(p);
    const auto f = parse_matrix_format(format);
    if (!f) throw InvalidArgument(fmt::format("--format must be sqfm, idx or csv, got '{}'", format));
    return *f;
  }
};

template <typename T, typename Parse>
T parse_enum(const std::string& text, std::string_view flag, std::string_view choices, Parse parse) {
  const auto v = parse(text);
  if (!v) throw InvalidArgument(fmt::format("{} must be one of {}, got '{}'", flag, choices, text));
  return *v;
}

void check_ratio(double r, std::string_view flag) {
  if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument(fmt::format("{} must be in (0, 1], got {}", flag, r));
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::shared_ptr<spdlog::logger> log;

  std::uint64_t resolve_seed() {
    if (!seed) {
      std::random_device rd;
      seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      log->info("no --seed given; using entropy seed {}", *seed);
    }
    return *seed;
  }
};

// features ------------------------------------------------------------------

struct FeaturesCmd {
  InputArgs in;
  std::string transform = "identity";
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t levels = 1;
  std::size_t downsample = 0;
  bool center = false;
  std::string center_from;
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("features", "transform, downsample and center a feature matrix (SQFM out)");
    in.add_to(c, "--input", "input matrix");
    c->add_option("--transform", transform, "identity | dct2d | haar2d");
    c->add_option("--height", height, "image height (dct2d, haar2d)");
    c->add_option("--width", width, "image width (dct2d, haar2d)");
    c->add_option("--levels", levels, "haar2d decomposition levels")->check(CLI::PositiveNumber);
    c->add_option("--downsample", downsample, "keep this many evenly strided columns");
    c->add_flag("--center", center, "subtract this matrix's column means");
    c->add_option("--center-from", center_from, "subtract column means of this matrix (same pipeline applied)")
        ->check(CLI::ExistingFile);
    c->add_option("--out", out, "output SQFM path")->required();
  }

  FeatureMatrix pipeline(const FeatureMatrix& m, const features::TransformSpec& spec) const {
    auto t = features::apply_transform(m, spec);
    if (downsample != 0) t = features::downsample(t, downsample);
    return t;
  }

  int run(Globals&, std::ostream& os) const {
    features::TransformSpec spec;
    spec.kind = parse_enum<features::TransformKind>(transform, "--transform", "identity, dct2d, haar2d",
                                                    features::parse_transform_kind);
    spec.height = height;
    spec.width = width;
    spec.dwt_levels = levels;
    if (center && !center_from.empty()) throw InvalidArgument("--center and --center-from are exclusive");
    const auto m = in.load();
    if (spec.kind != features::TransformKind::identity) spec.validate(m.cols());
    if (downsample > m.cols()) {
      throw InvalidArgument(fmt::format("--downsample {} exceeds the {} input columns", downsample, m.cols()));
    }
    auto result = pipeline(m, spec);
    if (center) result = features::apply_centering(result, features::fit_centering(result));
    if (!center_from.empty()) {
      const auto ref = pipeline(in.load_path(center_from), spec);
      result = features::apply_centering(result, features::fit_centering(ref));
    }
    save_feature_matrix(result, out);
    fmt::print(os, "wrote {} x {} to {}\n", result.rows(), result.cols(), out);
    return kExitOk;
  }
};

// project -------------------------------------------------------------------

struct ProjectCmd {
  InputArgs in;
  std::string kind = "sparse";
  std::size_t m = 0;
  double compression = 0.5;
  std::string load_matrix;
  std::string save_matrix;
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("project", "build, apply and save random projections");
    in.add_to(c, "--input", "input matrix");
    c->add_option("--kind", kind, "sparse | gaussian");
    c->add_option("--m", m, "output dimension (overrides --compression)");
    c->add_option("--compression", compression, "m/n in (0, 1]");
    c->add_option("--load-matrix", load_matrix, "reuse a saved SQPR projection")->check(CLI::ExistingFile);
    c->add_option("--save-matrix", save_matrix, "write the projection as SQPR");
    c->add_option("--out", out, "projected SQFM path");
  }

  int run(Globals& g, std::ostream& os) const {
    if (out.empty() && save_matrix.empty()) throw InvalidArgument("project needs --out and/or --save-matrix");
    const auto pk = parse_enum<ProjectionKind>(kind, "--kind", "sparse, gaussian", parse_projection_kind);
    if (pk == ProjectionKind::none) throw InvalidArgument("--kind must be sparse or gaussian");
    check_ratio(compression, "--compression");
    const auto x = in.load();
    std::optional<Projection> p;
    if (!load_matrix.empty()) {
      p = load_projection(load_matrix);
    } else {
      const std::size_t dim = m != 0 ? m : projected_dim(x.cols(), compression);
      if (dim > x.cols()) throw InvalidArgument(fmt::format("--m {} exceeds the {} input columns", dim, x.cols()));
      p = make_projection(pk, dim, x.cols(), g.resolve_seed());
    }
    if (input_dim(*p) != x.cols()) throw DimensionMismatch("projection input dimension", x.cols(), input_dim(*p));
    if (!save_matrix.empty()) save_projection(*p, save_matrix);
    if (!out.empty()) {
      const auto y = project(*p, x);
      save_feature_matrix(y, out);
      fmt::print(os, "wrote {} x {} to {}\n", y.rows(), y.cols(), out);
    }
    return kExitOk;
  }
};

// quantize ------------------------------------------------------------------

struct QuantizeCmd {
  InputArgs in;
  std::string kind = "TC";
  double ratio = 0.0;
  std::string layout = "dense";
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("quantize", "emit TC / BC / RC codes as SQFM");
    in.add_to(c, "--input", "input matrix (centered)");
    c->add_option("--kind", kind, "TC | BC | RC");
    c->add_option("--ratio", ratio, "sparsity ratio k/n in (0, 1]")->required();
    c->add_option("--layout", layout, "dense | triplets (nnz x [row, index, value])");
    c->add_option("--out", out, "output SQFM path")->required();
  }

  int run(Globals& g, std::ostream& os) const {
    check_ratio(ratio, "--ratio");
    const auto ck = parse_enum<CodeKind>(kind, "--kind", "TC, BC, RC", parse_code_kind);
    if (layout != "dense" && layout != "triplets") {
      throw InvalidArgument(fmt::format("--layout must be dense or triplets, got '{}'", layout));
    }
    const auto x = in.load();
    if (x.cols() == 0) throw InvalidArgument("input has no columns");
    const std::size_t k = SparsityRatio(ratio).k_for(x.cols());
    const auto codes = quantize_rows(ck, x, k, g.threads);
    const auto m = layout == "dense" ? codes_to_dense(codes, &x) : codes_to_triplets(codes);
    save_feature_matrix(m, out);
    fmt::print(os, "wrote {} {} codes (k = {}) to {}\n", codes.size(), to_string(ck), k, out);
    return kExitOk;
  }
};

// classify ------------------------------------------------------------------

struct ClassifyCmd {
  InputArgs in;
  std::string test;
  std::string classifier = "knec";
  std::size_t k = 5;
  std::string metric = "cosine";
  std::string code_kind;
  double ratio = 1.0;
  bool center = false;
  std::string out;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("classify", "fit on train, predict test, write predictions CSV");
    in.add_to(c, "--train", "labelled training matrix (exemplars)");
    c->add_option("--test", test, "query matrix")->required()->check(CLI::ExistingFile);
    c->add_option("--classifier", classifier, "knn | knec | lsc");
    c->add_option("--k", k, "k_neighbors")->check(CLI::PositiveNumber);
    c->add_option("--metric", metric, "cosine | dot | euclidean");
    c->add_option("--code-kind", code_kind, "quantize both sides first: TC | BC | RC");
    c->add_option("--ratio", ratio, "sparsity ratio for --code-kind");
    c->add_flag("--center", center, "center both sides with train means first");
    c->add_option("--out", out, "predictions CSV path")->required();
  }

  int run(Globals& g, std::ostream& os) const {
    check_ratio(ratio, "--ratio");
    ClassifierParams params;
    params.kind = parse_enum<ClassifierKind>(classifier, "--classifier", "knn, knec, lsc", parse_classifier_kind);
    params.metric = parse_enum<Metric>(metric, "--metric", "cosine, dot, euclidean", parse_metric);
    params.k_neighbors = k;
    std::optional<CodeKind> ck;
    if (!code_kind.empty()) ck = parse_enum<CodeKind>(code_kind, "--code-kind", "TC, BC, RC", parse_code_kind);
    auto tr = in.load();
    auto te = in.load_path(test);
    if (!tr.has_labels()) throw InvalidArgument("--train must carry labels");
    if (tr.cols() != te.cols()) throw DimensionMismatch("test columns", tr.cols(), te.cols());
    if (center) {
      const auto s = features::fit_centering(tr);
      tr = features::apply_centering(tr, s);
      te = features::apply_centering(te, s);
    }
    const auto to_codes = [&](const FeatureMatrix& m) {
      if (ck) return quantize_rows(*ck, m, SparsityRatio(ratio).k_for(m.cols()), g.threads);
      std::vector<Code> v;
      for (std::size_t r = 0; r < m.rows(); ++r) v.push_back(Code::from_dense(m.row(r)));
      return v;
    };
    const ClassifierModel model(params, to_codes(tr), {tr.labels().begin(), tr.labels().end()}, tr.class_count());
    const auto preds = classify_batch(model, to_codes(te), g.threads);
    std::string csv = te.has_labels() ? "row,predicted,label\n" : "row,predicted\n";
    for (std::size_t i = 0; i < preds.size(); ++i) {
      csv += te.has_labels() ? fmt::format("{},{},{}\n", i, preds[i].label, te.label(i))
                             : fmt::format("{},{}\n", i, preds[i].label);
    }
    write_file_atomic(out, csv);
    if (te.has_labels()) {
      fmt::print(os, "accuracy {:.2f}\n", accuracy_percent(preds, std::vector<std::uint32_t>(te.labels().begin(),
                                                                                             te.labels().end())));
    }
    return kExitOk;
  }
};

// bench ---------------------------------------------------------------------

struct BenchCmd {
  std::string config;
  std::string out;
  std::string format;
  std::vector<double> ratios;
  std::vector<std::string> code_kinds;
  std::vector<std::string> classifiers;
  std::optional<std::size_t> k;
  std::string metric;
  std::string projection;
  std::optional<double> compression;
  std::optional<std::size_t> repeats;
  bool timings = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("bench", "run a sparsity-ratio sweep and write a CSV or JSON report");
    c->add_option("--config", config, "YAML sweep config")->check(CLI::ExistingFile);
    c->add_option("--out", out, "report path (.csv or .json)")->required();
    c->add_option("--report-format", format, "csv | json (default: from --out extension)");
    c->add_option("--ratios", ratios, "sparsity ratios")->delimiter(',');
    c->add_option("--code-kinds", code_kinds, "subset of RC,TC,BC")->delimiter(',');
    c->add_option("--classifiers", classifiers, "subset of knn,knec,lsc")->delimiter(',');
    c->add_option("--k", k, "k_neighbors");
    c->add_option("--metric", metric, "cosine | dot | euclidean");
    c->add_option("--projection", projection, "none | sparse | gaussian");
    c->add_option("--compression", compression, "projection m/n");
    c->add_option("--repeats", repeats, "projection repeats");
    c->add_flag("--timings", timings, "include per-cell wall-clock seconds in JSON");
  }

  int run(Globals& g, std::ostream& os) const {
    SweepConfig cfg = config.empty() ? SweepConfig{} : load_sweep_config(config);
    if (!ratios.empty()) cfg.ratios = ratios;
    if (!code_kinds.empty()) {
      cfg.code_kinds.clear();
      for (const auto& s : code_kinds) cfg.code_kinds.push_back(parse_enum<CodeKind>(s, "--code-kinds", "RC, TC, BC", parse_code_kind));
    }
    if (!classifiers.empty()) {
      cfg.classifiers.clear();
      for (const auto& s : classifiers) {
        cfg.classifiers.push_back(parse_enum<ClassifierKind>(s, "--classifiers", "knn, knec, lsc", parse_classifier_kind));
      }
    }
    if (k) cfg.k_neighbors = *k;
    if (!metric.empty()) cfg.metric = parse_enum<Metric>(metric, "--metric", "cosine, dot, euclidean", parse_metric);
    if (!projection.empty()) {
      cfg.projection = parse_enum<ProjectionKind>(projection, "--projection", "none, sparse, gaussian", parse_projection_kind);
    }
    if (compression) cfg.compression_ratio = *compression;
    if (repeats) cfg.projection_repeats = *repeats;
    if (timings) cfg.timings = true;
    if (g.seed || !cfg.seed) cfg.seed = g.resolve_seed();
    if (g.threads != 0) cfg.threads = g.threads;
    cfg.validate();

    ReportFormat rf = ReportFormat::json;
    if (!format.empty()) {
      rf = parse_enum<ReportFormat>(format, "--report-format", "csv, json", parse_report_format);
    } else if (std::filesystem::path(out).extension() == ".csv") {
      rf = ReportFormat::csv;
    }
    const auto [train, test] = load_dataset(cfg);
    const auto report = run_sweep(cfg, train, test);
    emit_report(report, rf, out);
    fmt::print(os, "wrote {} cells to {}\n", report.cells.size(), out);
    return kExitOk;
  }
};

// inspect -------------------------------------------------------------------

struct InspectCmd {
  InputArgs in;
  std::size_t bins = 10;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("inspect", "print header fields and a row-sparsity histogram");
    in.add_to(c, "--input", "matrix to inspect");
    c->add_option("--bins", bins, "histogram bins over nonzero fraction")->check(CLI::PositiveNumber);
  }

  int run(Globals&, std::ostream& os) const {
    const auto fmt_kind = in.resolve_format(in.path);
    if (fmt_kind == MatrixFormat::sqfm) {
      const auto h = read_sqfm_header(in.path);
      fmt::print(os, "format sqfm\nversion {}\n", h.version);
    } else {
      fmt::print(os, "format {}\n", fmt_kind == MatrixFormat::idx ? "idx" : "csv");
    }
    const auto m = in.load();
    fmt::print(os, "rows {}\ncols {}\nlabels {}\n", m.rows(), m.cols(), m.has_labels() ? "yes" : "no");
    if (m.has_labels()) {
      fmt::print(os, "classes {}\n", m.class_count());
      std::vector<std::size_t> per(m.class_count(), 0);
      for (auto l : m.labels()) ++per[l];
      for (std::size_t c = 0; c < per.size(); ++c) fmt::print(os, "class {} {}\n", c, per[c]);
    }
    std::vector<std::size_t> hist(bins, 0);
    std::size_t total_nnz = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const auto row = m.row(r);
      const auto nnz = static_cast<std::size_t>(std::count_if(row.begin(), row.end(), [](float v) { return v != 0; }));
      total_nnz += nnz;
      const std::size_t b = m.cols() == 0 ? 0 : std::min(bins - 1, nnz * bins / m.cols());
      ++hist[b];
    }
    const double cells = static_cast<double>(m.rows() * m.cols());
    fmt::print(os, "nonzero_fraction {:.4f}\n", cells > 0 ? static_cast<double>(total_nnz) / cells : 0.0);
    for (std::size_t b = 0; b < bins; ++b) {
      fmt::print(os, "sparsity_bin {:.4f} {:.4f} {}\n", static_cast<double>(b) / static_cast<double>(bins),
                 static_cast<double>(b + 1) / static_cast<double>(bins), hist[b]);
    }
    return kExitOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  Globals g;
  g.log = std::make_shared<spdlog::logger>("sqcodes", sink);
  g.log->set_pattern("sqcodes: %v");

  CLI::App app{"Sparse ternary, binary and real-valued codes for exemplar-based classification", "sqcodes"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--seed", g.seed, "master seed for every random component (default: entropy, logged)");
  app.add_option("--threads", g.threads, "worker threads (0 = all cores)");

  FeaturesCmd features_cmd;
  ProjectCmd project_cmd;
  QuantizeCmd quantize_cmd;
  ClassifyCmd classify_cmd;
  BenchCmd bench_cmd;
  InspectCmd inspect_cmd;
  features_cmd.add(app);
  project_cmd.add(app);
  quantize_cmd.add(app);
  classify_cmd.add(app);
  bench_cmd.add(app);
  inspect_cmd.add(app);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "features") return features_cmd.run(g, out);
    if (name == "project") return project_cmd.run(g, out);
    if (name == "quantize") return quantize_cmd.run(g, out);
    if (name == "classify") return classify_cmd.run(g, out);
    if (name == "bench") return bench_cmd.run(g, out);
    if (name == "inspect") return inspect_cmd.run(g, out);
  } catch (const InvalidArgument& e) {
    fmt::print(err, "sqcodes: error: {}\n", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    fmt::print(err, "sqcodes: error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "sqcodes: data error: {}\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace sq::cli
