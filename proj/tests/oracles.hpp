#pragma once

// Independent reference implementations. Each one is written from the
// definition, shares no code with the library, and favours clarity over speed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// O(h^2 w^2) orthonormal 2D DCT-II straight from the double-sum definition.
inline std::vector<double> dct2d(const std::vector<double>& img, std::size_t h, std::size_t w) {
  std::vector<double> out(h * w, 0.0);
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t v = 0; v < w; ++v) {
      const double au = u == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
      const double av = v == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
      double s = 0.0;
      for (std::size_t x = 0; x < h; ++x) {
        for (std::size_t y = 0; y < w; ++y) {
          s += img[x * w + y] * std::cos(kPi * (2.0 * x + 1) * u / (2.0 * h)) *
               std::cos(kPi * (2.0 * y + 1) * v / (2.0 * w));
        }
      }
      out[u * w + v] = au * av * s;
    }
  }
  return out;
}

using Dense = std::vector<std::vector<double>>;

inline Dense matmul(const Dense& a, const Dense& b) {
  Dense c(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Dense transpose(const Dense& a) {
  Dense t(a[0].size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) t[j][i] = a[i][j];
  return t;
}

/// Single-level orthonormal Haar analysis matrix: averages on top, details below.
inline Dense haar_matrix(std::size_t n) {
  Dense m(n, std::vector<double>(n, 0.0));
  const double s = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < n / 2; ++i) {
    m[i][2 * i] = s;
    m[i][2 * i + 1] = s;
    m[n / 2 + i][2 * i] = s;
    m[n / 2 + i][2 * i + 1] = -s;
  }
  return m;
}

/// Multilevel 2D Haar: at each level the LL block T becomes H_h T H_w^T.
inline std::vector<double> haar2d(const std::vector<double>& img, std::size_t h, std::size_t w, std::size_t levels) {
  Dense y(h, std::vector<double>(w));
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j) y[i][j] = img[i * w + j];
  std::size_t bh = h;
  std::size_t bw = w;
  for (std::size_t l = 0; l < levels; ++l) {
    Dense t(bh, std::vector<double>(bw));
    for (std::size_t i = 0; i < bh; ++i)
      for (std::size_t j = 0; j < bw; ++j) t[i][j] = y[i][j];
    const Dense r = matmul(matmul(haar_matrix(bh), t), transpose(haar_matrix(bw)));
    for (std::size_t i = 0; i < bh; ++i)
      for (std::size_t j = 0; j < bw; ++j) y[i][j] = r[i][j];
    bh /= 2;
    bw /= 2;
  }
  std::vector<double> out;
  for (const auto& row : y) out.insert(out.end(), row.begin(), row.end());
  return out;
}

/// Every nonzero index sorted by (|x| desc, index asc); the first k, ascending.
inline std::vector<std::uint32_t> top_k(std::span<const float> x, std::size_t k) {
  std::vector<std::uint32_t> order;
  for (std::uint32_t i = 0; i < x.size(); ++i)
    if (x[i] != 0.0f) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return std::fabs(x[a]) > std::fabs(x[b]); });
  if (order.size() > k) order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

/// y = R x with R given as one (row, sign) per column, materialized densely.
inline std::vector<double> sparse_project(const std::vector<std::pair<std::uint32_t, int>>& cols, std::size_t m,
                                          std::span<const float> x) {
  Dense r(m, std::vector<double>(cols.size(), 0.0));
  for (std::size_t j = 0; j < cols.size(); ++j) r[cols[j].first][j] = cols[j].second;
  std::vector<double> y(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) y[i] += r[i][j] * x[j];
  return y;
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix: (values, vectors as columns).
inline std::pair<std::vector<double>, Dense> jacobi_eigen(Dense a) {
  const std::size_t n = a.size();
  Dense v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = a[i][i];
  return {vals, v};
}

/// || q - E w || with w = (E^T E)^+ E^T q; eigenvalues below 1e-12 * max are dropped.
inline double lsc_residual(const std::vector<double>& q, const std::vector<std::vector<double>>& columns) {
  const std::size_t k = columns.size();
  const std::size_t n = q.size();
  Dense g(k, std::vector<double>(k, 0.0));
  std::vector<double> b(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t t = 0; t < n; ++t) g[i][j] += columns[i][t] * columns[j][t];
    for (std::size_t t = 0; t < n; ++t) b[i] += columns[i][t] * q[t];
  }
  const auto [vals, vecs] = jacobi_eigen(g);
  const double top = *std::max_element(vals.begin(), vals.end());
  std::vector<double> w(k, 0.0);
  for (std::size_t e = 0; e < k; ++e) {
    if (!(vals[e] > 1e-12 * top)) continue;
    double proj = 0.0;
    for (std::size_t i = 0; i < k; ++i) proj += vecs[i][e] * b[i];
    for (std::size_t i = 0; i < k; ++i) w[i] += vecs[i][e] * proj / vals[e];
  }
  double r2 = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    double fit = 0.0;
    for (std::size_t i = 0; i < k; ++i) fit += columns[i][t] * w[i];
    r2 += (q[t] - fit) * (q[t] - fit);
  }
  return std::sqrt(r2);
}

/// Dense similarity from the definition: cosine or dot (double, index order).
inline double similarity(const std::vector<float>& a, const std::vector<float>& b, bool cosine) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (!cosine) return dot;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Exemplar indices fully sorted by (score desc, index asc).
inline std::vector<std::size_t> ranked(const std::vector<double>& scores) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return idx;
}

inline std::uint32_t first_max(const std::vector<double>& v) {
  std::uint32_t best = 0;
  for (std::uint32_t i = 0; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

/// Unweighted vote over the k globally best exemplars.
inline std::uint32_t knn(const std::vector<std::vector<float>>& ex, const std::vector<std::uint32_t>& labels,
                         std::size_t classes, const std::vector<float>& q, std::size_t k) {
  std::vector<double> s;
  for (const auto& e : ex) s.push_back(similarity(q, e, true));
  const auto order = ranked(s);
  std::vector<double> votes(classes, 0.0);
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) votes[labels[order[i]]] += 1.0;
  return first_max(votes);
}

/// Per class: sum of the best min(k, |class|) similarities, summed best first.
inline std::pair<std::uint32_t, std::vector<double>> knec(const std::vector<std::vector<float>>& ex,
                                                          const std::vector<std::uint32_t>& labels,
                                                          std::size_t classes, const std::vector<float>& q,
                                                          std::size_t k) {
  std::vector<double> score(classes, 0.0);
  for (std::uint32_t c = 0; c < classes; ++c) {
    std::vector<double> s;
    for (std::size_t i = 0; i < ex.size(); ++i)
      if (labels[i] == c) s.push_back(similarity(q, ex[i], true));
    const auto order = ranked(s);
    for (std::size_t i = 0; i < std::min(k, order.size()); ++i) score[c] += s[order[i]];
  }
  return {first_max(score), score};
}

}  // namespace oracle

namespace testing_support {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("sqcodes-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<float> laplace_vector(std::mt19937_64& g, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution coin(0.5);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(coin(g) ? e(g) : -e(g));
  return v;
}

inline std::vector<float> normal_vector(std::mt19937_64& g, std::size_t n, double sd = 1.0) {
  std::normal_distribution<double> d(0.0, sd);
  std::vector<float> v(n);
  for (auto& x : v) x = static_cast<float>(d(g));
  return v;
}

inline std::vector<float> ternary_vector(std::mt19937_64& g, std::size_t n, double density) {
  std::bernoulli_distribution on(density);
  std::bernoulli_distribution pos(0.5);
  std::vector<float> v(n, 0.0f);
  for (auto& x : v)
    if (on(g)) x = pos(g) ? 1.0f : -1.0f;
  return v;
}

}  // namespace testing_support
