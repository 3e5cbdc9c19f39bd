#include "sq/features.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "sq/error.hpp"

namespace sq::features {
namespace {

// Row-major N x N orthonormal DCT-II basis: C[k][n] = s_k cos(pi (2n+1) k / 2N).
std::vector<double> dct_matrix(std::size_t n) {
  std::vector<double> c(n * n);
  const double s0 = std::sqrt(1.0 / static_cast<double>(n));
  const double sk = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double angle = std::numbers::pi * static_cast<double>((2 * i + 1) * k) /
                           static_cast<double>(2 * n);
      c[k * n + i] = (k == 0 ? s0 : sk) * std::cos(angle);
    }
  }
  return c;
}

// out = C * img (transform columns) or img * C^T (transform rows); transpose
// selects C^T for the inverse.
void transform_rows(const std::vector<double>& c, bool transpose, std::size_t h, std::size_t w,
                    const double* in, double* out) {
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t k = 0; k < w; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < w; ++i) {
        acc += (transpose ? c[i * w + k] : c[k * w + i]) * in[r * w + i];
      }
      out[r * w + k] = acc;
    }
  }
}

void transform_cols(const std::vector<double>& c, bool transpose, std::size_t h, std::size_t w,
                    const double* in, double* out) {
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t col = 0; col < w; ++col) out[k * w + col] = 0.0;
    for (std::size_t i = 0; i < h; ++i) {
      const double coef = transpose ? c[i * h + k] : c[k * h + i];
      for (std::size_t col = 0; col < w; ++col) out[k * w + col] += coef * in[i * w + col];
    }
  }
}

FeatureMatrix dct2d_impl(const FeatureMatrix& m, const TransformSpec& spec, bool inverse) {
  spec.validate(m.cols());
  const std::size_t h = spec.height, w = spec.width;
  const auto ch = dct_matrix(h);
  const auto cw = dct_matrix(w);
  std::vector<float> out(m.data().size());
  std::vector<double> a(h * w), b(h * w);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = row[i];
    if (!inverse) {
      transform_rows(cw, false, h, w, a.data(), b.data());
      transform_cols(ch, false, h, w, b.data(), a.data());
    } else {
      transform_cols(ch, true, h, w, a.data(), b.data());
      transform_rows(cw, true, h, w, b.data(), a.data());
    }
    for (std::size_t i = 0; i < a.size(); ++i) out[r * a.size() + i] = static_cast<float>(a[i]);
  }
  return m.with_values(m.cols(), std::move(out));
}

// One analysis (or synthesis) step along rows and then columns of the
// top-left `h x w` block of a `width`-stride image.
void haar_step(double* img, std::size_t stride, std::size_t h, std::size_t w, bool inverse,
               std::vector<double>& tmp) {
  const double s = std::numbers::sqrt2 / 2.0;
  auto along_rows = [&] {
    tmp.resize(w);
    for (std::size_t r = 0; r < h; ++r) {
      double* p = img + r * stride;
      for (std::size_t i = 0; i < w / 2; ++i) {
        if (!inverse) {
          tmp[i] = (p[2 * i] + p[2 * i + 1]) * s;
          tmp[w / 2 + i] = (p[2 * i] - p[2 * i + 1]) * s;
        } else {
          tmp[2 * i] = (p[i] + p[w / 2 + i]) * s;
          tmp[2 * i + 1] = (p[i] - p[w / 2 + i]) * s;
        }
      }
      for (std::size_t i = 0; i < w; ++i) p[i] = tmp[i];
    }
  };
  auto along_cols = [&] {
    tmp.resize(h);
    for (std::size_t c = 0; c < w; ++c) {
      for (std::size_t i = 0; i < h / 2; ++i) {
        const double a = img[(inverse ? i : 2 * i) * stride + c];
        const double b = img[(inverse ? h / 2 + i : 2 * i + 1) * stride + c];
        if (!inverse) {
          tmp[i] = (a + b) * s;
          tmp[h / 2 + i] = (a - b) * s;
        } else {
          tmp[2 * i] = (a + b) * s;
          tmp[2 * i + 1] = (a - b) * s;
        }
      }
      for (std::size_t i = 0; i < h; ++i) img[i * stride + c] = tmp[i];
    }
  };
  if (!inverse) {
    along_rows();
    along_cols();
  } else {
    along_cols();
    along_rows();
  }
}

FeatureMatrix haar2d_impl(const FeatureMatrix& m, const TransformSpec& spec, bool inverse) {
  spec.validate(m.cols());
  const std::size_t h = spec.height, w = spec.width, levels = spec.dwt_levels;
  std::vector<float> out(m.data().size());
  std::vector<double> img(h * w), tmp;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = row[i];
    if (!inverse) {
      for (std::size_t l = 0; l < levels; ++l) haar_step(img.data(), w, h >> l, w >> l, false, tmp);
    } else {
      for (std::size_t l = levels; l-- > 0;) haar_step(img.data(), w, h >> l, w >> l, true, tmp);
    }
    for (std::size_t i = 0; i < img.size(); ++i) out[r * img.size() + i] = static_cast<float>(img[i]);
  }
  return m.with_values(m.cols(), std::move(out));
}

}  // namespace

std::optional<TransformKind> parse_transform_kind(std::string_view text) noexcept {
  if (text == "identity" || text == "none") return TransformKind::identity;
  if (text == "dct2d" || text == "dct") return TransformKind::dct2d;
  if (text == "haar2d" || text == "haar" || text == "dwt") return TransformKind::haar2d;
  return std::nullopt;
}

void TransformSpec::validate(std::size_t cols) const {
  if (kind == TransformKind::identity) return;
  if (height == 0 || width == 0) throw InvalidArgument("transform needs positive height and width");
  if (height * width != cols) {
    throw DimensionMismatch(fmt::format("image {}x{} vs feature dimension", height, width),
                            height * width, cols);
  }
  if (kind == TransformKind::haar2d) {
    if (dwt_levels == 0) throw InvalidArgument("haar2d needs dwt_levels >= 1");
    const std::size_t block = dwt_levels < 8 * sizeof(std::size_t) ? std::size_t{1} << dwt_levels : 0;
    if (block == 0 || height % block != 0 || width % block != 0) {
      throw InvalidArgument(fmt::format(
          "haar2d with {} levels needs height and width divisible by {} (got {}x{})", dwt_levels,
          block, height, width));
    }
  }
}

std::vector<double> dct1d(std::span<const double> x) {
  const std::size_t n = x.size();
  const auto c = dct_matrix(n);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) out[k] += c[k * n + i] * x[i];
  }
  return out;
}

std::vector<double> haar1d(std::span<const double> x) {
  if (x.size() % 2 != 0) throw InvalidArgument("haar1d needs an even-length input");
  const double s = std::numbers::sqrt2 / 2.0;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size() / 2; ++i) {
    out[i] = (x[2 * i] + x[2 * i + 1]) * s;
    out[x.size() / 2 + i] = (x[2 * i] - x[2 * i + 1]) * s;
  }
  return out;
}

FeatureMatrix dct2d(const FeatureMatrix& m, const TransformSpec& spec) {
  if (spec.kind != TransformKind::dct2d) throw InvalidArgument("dct2d called with a non-DCT spec");
  return dct2d_impl(m, spec, false);
}

FeatureMatrix inverse_dct2d(const FeatureMatrix& m, const TransformSpec& spec) {
  if (spec.kind != TransformKind::dct2d) throw InvalidArgument("inverse_dct2d called with a non-DCT spec");
  return dct2d_impl(m, spec, true);
}

FeatureMatrix haar2d(const FeatureMatrix& m, const TransformSpec& spec) {
  if (spec.kind != TransformKind::haar2d) throw InvalidArgument("haar2d called with a non-Haar spec");
  return haar2d_impl(m, spec, false);
}

FeatureMatrix inverse_haar2d(const FeatureMatrix& m, const TransformSpec& spec) {
  if (spec.kind != TransformKind::haar2d) throw InvalidArgument("inverse_haar2d called with a non-Haar spec");
  return haar2d_impl(m, spec, true);
}

FeatureMatrix apply_transform(const FeatureMatrix& m, const TransformSpec& spec) {
  switch (spec.kind) {
    case TransformKind::identity: return m;
    case TransformKind::dct2d: return dct2d(m, spec);
    case TransformKind::haar2d: return haar2d(m, spec);
  }
  throw InvalidArgument("unknown transform");
}

CenteringStats fit_centering(const FeatureMatrix& train) {
  if (train.rows() == 0) throw InvalidArgument("fit_centering needs at least one training row");
  CenteringStats stats{std::vector<double>(train.cols(), 0.0)};
  for (std::size_t r = 0; r < train.rows(); ++r) {
    auto row = train.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) stats.means[c] += row[c];
  }
  for (double& v : stats.means) v /= static_cast<double>(train.rows());
  return stats;
}

FeatureMatrix apply_centering(const FeatureMatrix& m, const CenteringStats& stats) {
  if (stats.means.size() != m.cols()) {
    throw DimensionMismatch("centering statistics length", m.cols(), stats.means.size());
  }
  std::vector<float> out(m.data().size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      out[r * m.cols() + c] = static_cast<float>(static_cast<double>(row[c]) - stats.means[c]);
    }
  }
  return m.with_values(m.cols(), std::move(out));
}

std::vector<std::size_t> downsample_indices(std::size_t cols, std::size_t target_dim) {
  if (target_dim == 0 || target_dim > cols) {
    throw InvalidArgument(
        fmt::format("downsample target {} must be in [1, {}]", target_dim, cols));
  }
  std::vector<std::size_t> idx;
  idx.reserve(target_dim);
  std::vector<bool> used(cols, false);
  for (std::size_t i = 0; i < target_dim; ++i) {
    // round-half-up of i * cols / target_dim in integer arithmetic
    std::size_t j = (2 * i * cols + target_dim) / (2 * target_dim);
    while (j < cols && used[j]) ++j;
    if (j >= cols) throw InvalidArgument("downsample ran out of columns");
    used[j] = true;
    idx.push_back(j);
  }
  return idx;
}

FeatureMatrix downsample(const FeatureMatrix& m, std::size_t target_dim) {
  const auto idx = downsample_indices(m.cols(), target_dim);
  std::vector<float> out;
  out.reserve(m.rows() * target_dim);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t j : idx) out.push_back(row[j]);
  }
  return m.with_values(target_dim, std::move(out));
}

}  // namespace sq::features
