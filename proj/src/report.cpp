#include <fmt/format.h>

#include "sq/tensor_io.hpp"

#include "sq/bench.hpp"
#include "sq/rng.hpp"

namespace sq {

namespace {

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    const auto u = static_cast<unsigned char>(ch);
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (u < 0x20) {
          out += fmt::format("\\u{:04x}", u);
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

std::string fixed4(double v) {
  if (v == 0.0) v = 0.0;  // no "-0.0000"
  return fmt::format("{:.4f}", v);
}

std::string opt_fixed4(const std::optional<double>& v) { return v ? fixed4(*v) : "null"; }

template <typename T, typename F>
std::string json_array(const std::vector<T>& v, F item) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += item(v[i]);
  }
  return out + "]";
}

std::string ratio_text(double r) {
  auto s = fmt::format("{}", r);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string path_or_null(const std::filesystem::path& p) { return p.empty() ? "null" : json_string(p.string()); }

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  return std::nullopt;
}

std::string report_csv(const BenchReport& r) {
  std::string out = "classifier,code_kind,ratio,accuracy_mean,accuracy_std,repeats\n";
  for (const auto& c : r.cells) {
    out += fmt::format("{},{},{},{},{},{}\n", to_string(c.classifier), to_string(c.code_kind), ratio_text(c.ratio),
                       c.accuracy_mean ? fmt::format("{:.2f}", *c.accuracy_mean) : "",
                       c.accuracy_std ? fmt::format("{:.2f}", *c.accuracy_std) : "", c.accuracy_per_repeat.size());
  }
  return out;
}

std::string report_json(const BenchReport& r) {
  const auto& cfg = r.config;
  const auto& ds = cfg.dataset;
  std::string o = "{\n";
  o += "  \"config\": {\n";
  o += fmt::format("    \"ratios\": {},\n", json_array(cfg.ratios, fixed4));
  o += fmt::format("    \"code_kinds\": {},\n",
                   json_array(cfg.code_kinds, [](CodeKind k) { return json_string(to_string(k)); }));
  o += fmt::format("    \"classifiers\": {},\n",
                   json_array(cfg.classifiers, [](ClassifierKind k) { return json_string(to_string(k)); }));
  o += fmt::format("    \"k_neighbors\": {},\n", cfg.k_neighbors);
  o += fmt::format("    \"metric\": {},\n", json_string(to_string(cfg.metric)));
  o += fmt::format("    \"projection\": {},\n", json_string(to_string(cfg.projection)));
  o += fmt::format("    \"compression_ratio\": {},\n", fixed4(cfg.compression_ratio));
  o += fmt::format("    \"projection_repeats\": {},\n", cfg.effective_repeats());
  o += fmt::format("    \"seed\": {},\n", cfg.seed ? fmt::format("{}", *cfg.seed) : "null");
  o += "    \"dataset\": {\n";
  o += fmt::format("      \"source\": {}", json_string(to_string(ds.source)));
  switch (ds.source) {
    case DatasetSpec::Source::synthetic: {
      const auto& s = ds.synthetic;
      o += fmt::format(
          ",\n      \"synthetic_seed\": {},\n      \"classes\": {},\n      \"dim\": {},\n      \"support\": {},\n"
          "      \"support_pool\": {},\n      \"shared_signs\": {},\n      \"amplitude\": {},\n"
          "      \"noise_sigma\": {},\n      \"hot_fraction\": {},\n      \"hot_scale\": {},\n"
          "      \"train_per_class\": {},\n      \"test_per_class\": {}",
          ds.synthetic_seed ? *ds.synthetic_seed : cfg.seed.value_or(0), s.classes, s.dim, s.support,
          s.support_pool, s.shared_signs, fixed4(s.amplitude), fixed4(s.noise_sigma), fixed4(s.hot_fraction),
          fixed4(s.hot_scale), s.train_per_class, s.test_per_class);
      break;
    }
    case DatasetSpec::Source::split:
      o += fmt::format(",\n      \"data\": {},\n      \"data_labels\": {},\n      \"split_fraction\": {}",
                       path_or_null(ds.data), path_or_null(ds.data_labels), fixed4(ds.split_fraction));
      break;
    case DatasetSpec::Source::files:
      o += fmt::format(
          ",\n      \"train\": {},\n      \"train_labels\": {},\n      \"test\": {},\n      \"test_labels\": {}",
          path_or_null(ds.train), path_or_null(ds.train_labels), path_or_null(ds.test), path_or_null(ds.test_labels));
      break;
  }
  o += "\n    }\n  },\n";
  o += fmt::format("  \"rng\": {{\"algorithm\": {}, \"seed\": {}}},\n", json_string(r.rng_algorithm),
                   cfg.seed.value_or(0));
  o += fmt::format(
      "  \"data\": {{\"train_rows\": {}, \"test_rows\": {}, \"input_dim\": {}, \"code_dim\": {}, \"class_count\": {}}},\n",
      r.train_rows, r.test_rows, r.input_dim, r.code_dim, r.class_count);
  o += fmt::format("  \"repeat_seeds\": {},\n",
                   json_array(r.repeat_seeds, [](std::uint64_t s) { return fmt::format("{}", s); }));
  o += "  \"cells\": [";
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const auto& c = r.cells[i];
    o += i ? ",\n    {" : "\n    {";
    o += fmt::format(
        "\"classifier\": {}, \"code_kind\": {}, \"ratio\": {}, \"k_sparsity\": {}, \"accuracy_mean\": {}, "
        "\"accuracy_std\": {}, \"repeats\": {}, \"accuracy_per_repeat\": {}",
        json_string(to_string(c.classifier)), json_string(to_string(c.code_kind)), fixed4(c.ratio), c.k_sparsity,
        opt_fixed4(c.accuracy_mean), opt_fixed4(c.accuracy_std), c.accuracy_per_repeat.size(),
        json_array(c.accuracy_per_repeat, fixed4));
    if (!c.skip_reason.empty()) o += fmt::format(", \"skipped\": {}", json_string(c.skip_reason));
    if (cfg.timings) o += fmt::format(", \"seconds\": {}", fixed4(c.seconds));
    o += "}";
  }
  o += r.cells.empty() ? "]\n}\n" : "\n  ]\n}\n";
  return o;
}

void emit_report(const BenchReport& r, ReportFormat format, const std::filesystem::path& path) {
  write_file_atomic(path, format == ReportFormat::csv ? report_csv(r) : report_json(r));
}

}  // namespace sq
