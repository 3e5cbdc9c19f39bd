#include "sq/tensor_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <string>

#include <fmt/format.h>
#include <zlib.h>

#include "sq/error.hpp"

namespace sq {
namespace {

using Kind = FormatError::Kind;

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<unsigned char>((v >> s) & 0xFF));
}

std::uint16_t get_u16_le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32_le(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

std::uint32_t get_u32_be(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

std::uint64_t get_uint_be(const unsigned char* p, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v = (v << 8) | p[i];
  return v;
}

bool looks_gzipped(std::span<const unsigned char> bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B;
}

std::vector<unsigned char> gunzip(std::span<const unsigned char> in, std::string_view source) {
  z_stream zs{};
  // 16 + MAX_WBITS: expect a gzip wrapper.
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw IoError("zlib initialisation failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  std::vector<unsigned char> out;
  unsigned char chunk[1 << 16];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk;
    zs.avail_out = sizeof(chunk);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      const auto at = zs.total_in;
      inflateEnd(&zs);
      throw FormatError(Kind::truncated_payload, source, at, false, "corrupt gzip stream");
    }
    out.insert(out.end(), chunk, chunk + (sizeof(chunk) - zs.avail_out));
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw FormatError(Kind::truncated_payload, source, in.size(), false,
                        "gzip stream ends early");
    }
  }
  inflateEnd(&zs);
  return out;
}

std::string source_name(const std::filesystem::path& p) { return p.string(); }

}  // namespace

std::optional<MatrixFormat> parse_matrix_format(std::string_view text) noexcept {
  if (text == "sqfm") return MatrixFormat::sqfm;
  if (text == "idx") return MatrixFormat::idx;
  if (text == "csv") return MatrixFormat::csv;
  return std::nullopt;
}

MatrixFormat guess_matrix_format(const std::filesystem::path& path) {
  std::string name = path.filename().string();
  if (name.size() > 3 && name.ends_with(".gz")) name.resize(name.size() - 3);
  if (name.ends_with(".csv")) return MatrixFormat::csv;
  if (name.ends_with(".sqfm")) return MatrixFormat::sqfm;
  if (name.find("-ubyte") != std::string::npos || name.find(".idx") != std::string::npos) {
    return MatrixFormat::idx;
  }
  return MatrixFormat::sqfm;
}

std::vector<unsigned char> read_file_bytes(const std::filesystem::path& path, bool inflate_gzip) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("read error on '{}'", path.string()));
  if (inflate_gzip && looks_gzipped(bytes)) return gunzip(bytes, source_name(path));
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const unsigned char> bytes) {
  std::random_device rd;
  auto tmp = path;
  tmp += fmt::format(".tmp{:08x}", rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", tmp.string()));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError(fmt::format("write error on '{}'", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError(fmt::format("cannot move output into place at '{}'", path.string()));
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const unsigned char>(
                              reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

// ---------------------------------------------------------------- SQFM

std::vector<unsigned char> encode_sqfm(const FeatureMatrix& m) {
  if (m.rows() > UINT32_MAX || m.cols() > UINT32_MAX) {
    throw InvalidArgument("matrix too large for SQFM (u32 dimensions)");
  }
  std::vector<unsigned char> out;
  out.reserve(kSqfmHeaderBytes + m.data().size() * 4 + m.labels().size() * 4);
  for (char c : std::string_view("SQFM")) out.push_back(static_cast<unsigned char>(c));
  put_u16(out, kSqfmVersion);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  out.push_back(m.has_labels() ? 1 : 0);
  for (float v : m.data()) put_u32(out, std::bit_cast<std::uint32_t>(v));
  for (std::uint32_t l : m.labels()) put_u32(out, l);
  return out;
}

SqfmHeader decode_sqfm_header(std::span<const unsigned char> bytes, std::string_view source) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "SQFM", 4) != 0) {
    throw FormatError(Kind::bad_magic, source, 0, false, "expected \"SQFM\"");
  }
  if (bytes.size() < kSqfmHeaderBytes) {
    throw FormatError(Kind::malformed_header, source, bytes.size(), false,
                      fmt::format("header needs {} bytes", kSqfmHeaderBytes));
  }
  SqfmHeader h;
  h.version = get_u16_le(bytes.data() + 4);
  if (h.version != kSqfmVersion) {
    throw FormatError(Kind::unsupported_version, source, 4, false,
                      fmt::format("version {}", h.version));
  }
  h.rows = get_u32_le(bytes.data() + 6);
  h.cols = get_u32_le(bytes.data() + 10);
  const unsigned char flags = bytes[14];
  if ((flags & ~1u) != 0) {
    throw FormatError(Kind::malformed_header, source, 14, false,
                      fmt::format("unknown flag bits 0x{:02x}", flags));
  }
  h.has_labels = (flags & 1u) != 0;
  return h;
}

FeatureMatrix decode_sqfm(std::span<const unsigned char> bytes, std::string_view source) {
  const SqfmHeader h = decode_sqfm_header(bytes, source);
  const std::uint64_t count = std::uint64_t{h.rows} * h.cols;
  const std::uint64_t payload_end = kSqfmHeaderBytes + count * 4;
  const std::uint64_t expected = payload_end + (h.has_labels ? std::uint64_t{h.rows} * 4 : 0);
  if (bytes.size() < payload_end) {
    throw FormatError(Kind::truncated_payload, source, bytes.size(), false,
                      fmt::format("header declares {}x{} ({} values) but only {} payload values "
                                  "are present",
                                  h.rows, h.cols, count, (bytes.size() - kSqfmHeaderBytes) / 4));
  }
  if (bytes.size() < expected) {
    throw FormatError(Kind::truncated_payload, source, bytes.size(), false,
                      fmt::format("label block needs {} bytes", std::uint64_t{h.rows} * 4));
  }
  if (bytes.size() > expected) {
    throw FormatError(Kind::trailing_bytes, source, expected, false,
                      fmt::format("{} unexpected bytes after payload", bytes.size() - expected));
  }
  std::vector<float> data(count);
  const unsigned char* p = bytes.data() + kSqfmHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, p += 4) {
    data[i] = std::bit_cast<float>(get_u32_le(p));
    if (!std::isfinite(data[i])) {
      throw FormatError(Kind::non_finite_value, source, kSqfmHeaderBytes + i * 4, false,
                        fmt::format("row {} column {}", i / h.cols, i % h.cols));
    }
  }
  std::vector<std::uint32_t> labels;
  std::optional<LabelSet> label_set;
  if (h.has_labels) {
    labels.resize(h.rows);
    for (std::uint32_t r = 0; r < h.rows; ++r, p += 4) labels[r] = get_u32_le(p);
    if (h.rows == 0) label_set = LabelSet{};
  }
  return FeatureMatrix(h.rows, h.cols, std::move(data), std::move(labels), std::move(label_set));
}

SqfmHeader read_sqfm_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  unsigned char buf[kSqfmHeaderBytes];
  in.read(reinterpret_cast<char*>(buf), kSqfmHeaderBytes);
  return decode_sqfm_header(std::span(buf, static_cast<std::size_t>(in.gcount())),
                            source_name(path));
}

// ---------------------------------------------------------------- IDX

FeatureMatrix decode_idx(std::span<const unsigned char> bytes, std::string_view source) {
  if (bytes.size() < 4 || bytes[0] != 0 || bytes[1] != 0) {
    throw FormatError(Kind::bad_magic, source, 0, false, "IDX magic must start with two zero bytes");
  }
  const unsigned char type = bytes[2];
  const std::size_t ndim = bytes[3];
  std::size_t width = 0;
  switch (type) {
    case 0x08: case 0x09: width = 1; break;
    case 0x0B: width = 2; break;
    case 0x0C: case 0x0D: width = 4; break;
    case 0x0E: width = 8; break;
    default:
      throw FormatError(Kind::malformed_header, source, 2, false,
                        fmt::format("unknown IDX element type 0x{:02x}", type));
  }
  if (ndim == 0) throw FormatError(Kind::malformed_header, source, 3, false, "zero dimensions");
  const std::size_t header = 4 + 4 * ndim;
  if (bytes.size() < header) {
    throw FormatError(Kind::malformed_header, source, bytes.size(), false,
                      fmt::format("{} dimension words expected", ndim));
  }
  std::uint64_t rows = get_u32_be(bytes.data() + 4);
  std::uint64_t cols = 1;
  for (std::size_t d = 1; d < ndim; ++d) cols *= get_u32_be(bytes.data() + 4 + 4 * d);
  const std::uint64_t count = rows * cols;
  const std::uint64_t expected = header + count * width;
  if (bytes.size() < expected) {
    throw FormatError(Kind::truncated_payload, source, bytes.size(), false,
                      fmt::format("dimensions need {} payload bytes, found {}", count * width,
                                  bytes.size() - header));
  }
  if (bytes.size() > expected) {
    throw FormatError(Kind::trailing_bytes, source, expected, false,
                      fmt::format("{} unexpected bytes after payload", bytes.size() - expected));
  }
  std::vector<float> data(count);
  const unsigned char* p = bytes.data() + header;
  for (std::uint64_t i = 0; i < count; ++i, p += width) {
    double v = 0.0;
    switch (type) {
      case 0x08: v = p[0]; break;
      case 0x09: v = static_cast<std::int8_t>(p[0]); break;
      case 0x0B: v = static_cast<std::int16_t>(get_uint_be(p, 2)); break;
      case 0x0C: v = static_cast<std::int32_t>(get_uint_be(p, 4)); break;
      case 0x0D: v = std::bit_cast<float>(static_cast<std::uint32_t>(get_uint_be(p, 4))); break;
      case 0x0E: v = std::bit_cast<double>(get_uint_be(p, 8)); break;
    }
    if (!std::isfinite(v) || std::abs(v) > 3.4e38) {
      throw FormatError(Kind::non_finite_value, source, header + i * width, false,
                        fmt::format("row {}", i / cols));
    }
    data[i] = static_cast<float>(v);
  }
  return FeatureMatrix(rows, cols, std::move(data));
}

std::vector<std::uint32_t> load_idx_labels(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path, true);
  const auto src = source_name(path);
  if (bytes.size() >= 4 && bytes[3] != 1) {
    throw FormatError(Kind::malformed_header, src, 3, false, "label file must be one-dimensional");
  }
  const FeatureMatrix m = decode_idx(bytes, src);
  std::vector<std::uint32_t> labels(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const float v = m.data()[i];
    if (v < 0 || v != std::floor(v)) {
      throw FormatError(Kind::bad_label, src, i, true, fmt::format("label {} is not a class index", v));
    }
    labels[i] = static_cast<std::uint32_t>(v);
  }
  return labels;
}

// ---------------------------------------------------------------- CSV

FeatureMatrix parse_csv(std::string_view text, const LoadOptions& options,
                        std::string_view source) {
  std::vector<float> data;
  std::vector<std::uint32_t> labels;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    const std::size_t this_line = line_no++;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (first && options.csv_header) {
      first = false;
      continue;
    }
    first = false;
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::vector<double> fields;
    std::size_t pos = 0;
    while (true) {
      const auto comma = line.find(',', pos);
      std::string_view field = line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      if (!field.empty() && field.front() == '+') field.remove_prefix(1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        throw FormatError(Kind::parse_error, source, this_line, true,
                          fmt::format("field {} '{}' is not a number", fields.size(), field));
      }
      fields.push_back(v);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    std::size_t width = fields.size();
    if (options.csv_labeled) {
      if (width < 2) {
        throw FormatError(Kind::dimension_mismatch, source, this_line, true,
                          "labeled rows need at least one feature and a label");
      }
      const double l = fields.back();
      if (l < 0 || l != std::floor(l) || l > UINT32_MAX) {
        throw FormatError(Kind::bad_label, source, this_line, true,
                          fmt::format("label {} is not a class index", l));
      }
      labels.push_back(static_cast<std::uint32_t>(l));
      --width;
    }
    if (rows == 0) {
      cols = width;
    } else if (width != cols) {
      throw FormatError(Kind::dimension_mismatch, source, this_line, true,
                        fmt::format("{} features, previous rows have {}", width, cols));
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (!std::isfinite(fields[c]) || std::abs(fields[c]) > 3.4e38) {
        throw FormatError(Kind::non_finite_value, source, this_line, true,
                          fmt::format("column {}", c));
      }
      data.push_back(static_cast<float>(fields[c]));
    }
    ++rows;
  }
  return FeatureMatrix(rows, cols, std::move(data), std::move(labels));
}

// ---------------------------------------------------------------- dispatch

FeatureMatrix load_feature_matrix(const std::filesystem::path& path, MatrixFormat format,
                                  const LoadOptions& options) {
  const auto src = source_name(path);
  switch (format) {
    case MatrixFormat::sqfm:
      return decode_sqfm(read_file_bytes(path), src);
    case MatrixFormat::idx: {
      FeatureMatrix m = decode_idx(read_file_bytes(path, true), src);
      if (options.idx_labels.empty()) return m;
      auto labels = load_idx_labels(options.idx_labels);
      if (labels.size() != m.rows()) {
        throw FormatError(Kind::dimension_mismatch, source_name(options.idx_labels), 4, false,
                          fmt::format("{} labels for {} images", labels.size(), m.rows()));
      }
      return m.with_labels(std::move(labels));
    }
    case MatrixFormat::csv: {
      const auto bytes = read_file_bytes(path);
      return parse_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                       options, src);
    }
  }
  throw InvalidArgument("unknown matrix format");
}

void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path) {
  write_file_atomic(path, encode_sqfm(m));
}

}  // namespace sq
