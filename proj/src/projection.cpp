#include "sq/projection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fmt/format.h>

#include "sq/error.hpp"
#include "sq/rng.hpp"
#include "sq/tensor_io.hpp"

namespace sq {

namespace {

constexpr unsigned char kMagic[4] = {'S', 'Q', 'P', 'R'};
constexpr std::uint16_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 2 + 1 + 4 + 4 + 8;

void check_shape(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0 || m > n) {
    throw InvalidArgument(fmt::format("projection shape must satisfy 1 <= m <= n, got m={} n={}", m, n));
  }
}

template <typename T>
void put_le(std::vector<unsigned char>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

template <typename T>
T get_le(const unsigned char* p) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(p[i]) << (8 * i));
  return v;
}

}  // namespace

SparseProjection::SparseProjection(std::size_t m, std::size_t n, std::uint64_t seed,
                                   std::vector<ColumnEntry> column_entries)
    : m_(m), n_(n), seed_(seed), entries_(std::move(column_entries)) {
  check_shape(m, n);
  if (entries_.size() != n) throw DimensionMismatch("sparse projection column entries", n, entries_.size());
  for (std::size_t j = 0; j < n; ++j) {
    const auto& e = entries_[j];
    if (e.row >= m) {
      throw InvalidArgument(fmt::format("column {} maps to row {} but m = {}", j, e.row, m));
    }
    if (e.sign != 1 && e.sign != -1) {
      throw InvalidArgument(fmt::format("column {} has sign {}, expected +-1", j, int{e.sign}));
    }
  }
}

std::vector<float> SparseProjection::apply(std::span<const float> x) const {
  if (x.size() != n_) throw DimensionMismatch("projection input", n_, x.size());
  std::vector<double> acc(m_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) acc[entries_[j].row] += entries_[j].sign * static_cast<double>(x[j]);
  return {acc.begin(), acc.end()};
}

std::vector<float> SparseProjection::densify() const {
  std::vector<float> out(m_ * n_, 0.0f);
  for (std::size_t j = 0; j < n_; ++j) out[entries_[j].row * n_ + j] = entries_[j].sign;
  return out;
}

GaussianProjection::GaussianProjection(std::size_t m, std::size_t n, std::uint64_t seed,
                                       std::vector<float> data)
    : m_(m), n_(n), seed_(seed), data_(std::move(data)) {
  check_shape(m, n);
  if (data_.size() != m * n) throw DimensionMismatch("gaussian projection data", m * n, data_.size());
  for (float v : data_) {
    if (!std::isfinite(v)) throw InvalidArgument("gaussian projection has a non-finite entry");
  }
}

std::vector<float> GaussianProjection::apply(std::span<const float> x) const {
  if (x.size() != n_) throw DimensionMismatch("projection input", n_, x.size());
  std::vector<float> y(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    const float* r = data_.data() + i * n_;
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += static_cast<double>(r[j]) * x[j];
    y[i] = static_cast<float>(acc);
  }
  return y;
}

std::string_view to_string(ProjectionKind kind) noexcept {
  switch (kind) {
    case ProjectionKind::none: return "none";
    case ProjectionKind::sparse: return "sparse";
    case ProjectionKind::gaussian: return "gaussian";
  }
  return "?";
}

std::optional<ProjectionKind> parse_projection_kind(std::string_view text) noexcept {
  if (text == "none") return ProjectionKind::none;
  if (text == "sparse") return ProjectionKind::sparse;
  if (text == "gaussian") return ProjectionKind::gaussian;
  return std::nullopt;
}

SparseProjection make_sparse_projection(std::size_t m, std::size_t n, std::uint64_t seed) {
  check_shape(m, n);
  Rng rng(seed);
  std::vector<ColumnEntry> entries(n);
  for (auto& e : entries) {
    e.row = static_cast<std::uint32_t>(rng.uniform_index(m));
    e.sign = static_cast<std::int8_t>(rng.random_sign());
  }
  return SparseProjection(m, n, seed, std::move(entries));
}

GaussianProjection make_gaussian_projection(std::size_t m, std::size_t n, std::uint64_t seed) {
  check_shape(m, n);
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<float> data(m * n);
  for (auto& v : data) v = static_cast<float>(rng.normal(0.0, scale));
  return GaussianProjection(m, n, seed, std::move(data));
}

Projection make_projection(ProjectionKind kind, std::size_t m, std::size_t n, std::uint64_t seed) {
  switch (kind) {
    case ProjectionKind::sparse: return make_sparse_projection(m, n, seed);
    case ProjectionKind::gaussian: return make_gaussian_projection(m, n, seed);
    case ProjectionKind::none: break;
  }
  throw InvalidArgument("make_projection needs kind sparse or gaussian");
}

std::size_t projected_dim(std::size_t n, double compression_ratio) {
  if (!(compression_ratio > 0.0 && compression_ratio <= 1.0)) {
    throw InvalidArgument(fmt::format("compression ratio must be in (0, 1], got {}", compression_ratio));
  }
  const auto m = static_cast<std::size_t>(std::llround(compression_ratio * static_cast<double>(n)));
  return std::max<std::size_t>(1, m);
}

FeatureMatrix project(const SparseProjection& p, const FeatureMatrix& x) {
  if (x.cols() != p.input_dim()) throw DimensionMismatch("projection input columns", p.input_dim(), x.cols());
  const std::size_t m = p.output_dim();
  const auto entries = p.column_entries();
  std::vector<float> out(x.rows() * m);
  std::vector<double> acc(m);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::fill(acc.begin(), acc.end(), 0.0);
    const auto row = x.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) acc[entries[j].row] += entries[j].sign * static_cast<double>(row[j]);
    std::copy(acc.begin(), acc.end(), out.begin() + static_cast<std::ptrdiff_t>(r * m));
  }
  return x.with_values(m, std::move(out));
}

FeatureMatrix project(const GaussianProjection& p, const FeatureMatrix& x) {
  if (x.cols() != p.input_dim()) throw DimensionMismatch("projection input columns", p.input_dim(), x.cols());
  using RowMajor = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const std::size_t m = p.output_dim();
  const std::size_t n = p.input_dim();
  Eigen::Map<const RowMajor> xm(x.data().data(), static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(n));
  Eigen::Map<const RowMajor> rm(p.data().data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  std::vector<float> out(x.rows() * m);
  Eigen::Map<RowMajor> ym(out.data(), static_cast<Eigen::Index>(x.rows()), static_cast<Eigen::Index>(m));
  ym.noalias() = xm * rm.transpose();
  return x.with_values(m, std::move(out));
}

FeatureMatrix project(const Projection& p, const FeatureMatrix& x) {
  return std::visit([&](const auto& q) { return project(q, x); }, p);
}

std::size_t output_dim(const Projection& p) noexcept {
  return std::visit([](const auto& q) { return q.output_dim(); }, p);
}

std::size_t input_dim(const Projection& p) noexcept {
  return std::visit([](const auto& q) { return q.input_dim(); }, p);
}

std::vector<unsigned char> encode_projection(const Projection& p) {
  std::vector<unsigned char> out(kMagic, kMagic + 4);
  put_le<std::uint16_t>(out, kVersion);
  out.push_back(std::holds_alternative<SparseProjection>(p) ? 0 : 1);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(output_dim(p)));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(input_dim(p)));
  if (const auto* s = std::get_if<SparseProjection>(&p)) {
    put_le<std::uint64_t>(out, s->seed());
    for (const auto& e : s->column_entries()) {
      put_le<std::uint32_t>(out, e.row);
      out.push_back(static_cast<unsigned char>(e.sign));
    }
  } else {
    const auto& g = std::get<GaussianProjection>(p);
    put_le<std::uint64_t>(out, g.seed());
    for (float v : g.data()) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      put_le<std::uint32_t>(out, bits);
    }
  }
  return out;
}

Projection decode_projection(std::span<const unsigned char> bytes, std::string_view source) {
  using K = FormatError::Kind;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError(K::bad_magic, source, 0, false, "expected \"SQPR\"");
  }
  if (bytes.size() < kHeaderBytes) {
    throw FormatError(K::malformed_header, source, bytes.size(), false,
                      fmt::format("header needs {} bytes", kHeaderBytes));
  }
  const unsigned char* p = bytes.data();
  const auto version = get_le<std::uint16_t>(p + 4);
  if (version != kVersion) {
    throw FormatError(K::unsupported_version, source, 4, false, fmt::format("version {}", version));
  }
  const unsigned kind = p[6];
  const std::size_t m = get_le<std::uint32_t>(p + 7);
  const std::size_t n = get_le<std::uint32_t>(p + 11);
  const std::uint64_t seed = get_le<std::uint64_t>(p + 15);
  if (kind > 1) throw FormatError(K::malformed_header, source, 6, false, fmt::format("kind {}", kind));
  if (m == 0 || n == 0 || m > n) {
    throw FormatError(K::malformed_header, source, 7, false, fmt::format("bad shape m={} n={}", m, n));
  }
  const std::size_t payload = kind == 0 ? n * 5 : m * n * 4;
  const std::size_t have = bytes.size() - kHeaderBytes;
  if (have < payload) {
    throw FormatError(K::truncated_payload, source, bytes.size(), false,
                      fmt::format("payload declares {} bytes, {} present", payload, have));
  }
  if (have > payload) {
    throw FormatError(K::trailing_bytes, source, kHeaderBytes + payload, false,
                      fmt::format("{} bytes after payload", have - payload));
  }
  const unsigned char* q = p + kHeaderBytes;
  try {
    if (kind == 0) {
      std::vector<ColumnEntry> entries(n);
      for (std::size_t j = 0; j < n; ++j, q += 5) {
        entries[j] = {get_le<std::uint32_t>(q), static_cast<std::int8_t>(q[4])};
      }
      return SparseProjection(m, n, seed, std::move(entries));
    }
    std::vector<float> data(m * n);
    for (auto& v : data) {
      const auto bits = get_le<std::uint32_t>(q);
      std::memcpy(&v, &bits, 4);
      q += 4;
    }
    return GaussianProjection(m, n, seed, std::move(data));
  } catch (const InvalidArgument& e) {
    throw FormatError(K::parse_error, source, kHeaderBytes, false, e.what());
  }
}

void save_projection(const Projection& p, const std::filesystem::path& path) {
  write_file_atomic(path, encode_projection(p));
}

Projection load_projection(const std::filesystem::path& path) {
  return decode_projection(read_file_bytes(path, false), path.string());
}

}  // namespace sq
