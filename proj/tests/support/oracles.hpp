#pragma once

// Reference computations for tests. Each one is written from the textbook
// definition and shares no code with the library path it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

namespace acbeta::oracle {

// Literal quadruple loop of the 2D DCT-II with prefactor (2/N) C(u) C(v).
// samples[x * 8 + y]: x is the row, paired with the vertical frequency u.
inline std::array<double, 64> dct_literal(const std::array<double, 64>& samples) {
  constexpr int n = 8;
  const double pi = std::numbers::pi;
  auto c = [](int k) { return k == 0 ? 1.0 / std::sqrt(2.0) : 1.0; };
  std::array<double, 64> out{};
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      double sum = 0.0;
      for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
          sum += c(u) * c(v) * samples[x * n + y] * std::cos((2 * x + 1) * u * pi / (2.0 * n)) *
                 std::cos((2 * y + 1) * v * pi / (2.0 * n));
        }
      }
      out[u * n + v] = (2.0 / n) * sum;
    }
  }
  return out;
}

// Mann-Whitney pair count over all (fake, real) pairs.
inline double auc_pairs(const std::vector<std::pair<double, bool>>& scored) {
  double wins = 0.0;
  double pairs = 0.0;
  for (const auto& [fs, f_is_fake] : scored) {
    if (!f_is_fake) continue;
    for (const auto& [rs, r_is_fake] : scored) {
      if (r_is_fake) continue;
      pairs += 1.0;
      if (fs > rs) wins += 1.0;
      else if (fs == rs) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Neumaier-compensated mean.
inline double compensated_mean(const std::vector<double>& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return (sum + carry) / static_cast<double>(values.size());
}

// Solves A x = b by Gauss-Jordan elimination with partial pivoting.
inline std::vector<double> solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= factor * a[col][k];
      b[r] -= factor * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

// Closed-form two-class LDA direction Sigma^-1 (mu1 - mu0) with the pooled
// (n - 2) covariance; `ridge` is added to the diagonal as given.
inline std::vector<double> lda_direction(const std::vector<std::vector<double>>& class0,
                                         const std::vector<std::vector<double>>& class1, double ridge) {
  const std::size_t d = class0.front().size();
  auto mean = [d](const std::vector<std::vector<double>>& pts) {
    std::vector<double> m(d, 0.0);
    for (const auto& p : pts)
      for (std::size_t i = 0; i < d; ++i) m[i] += p[i];
    for (auto& v : m) v /= static_cast<double>(pts.size());
    return m;
  };
  const auto m0 = mean(class0);
  const auto m1 = mean(class1);
  std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
  for (const auto* cls : {&class0, &class1}) {
    const auto& m = cls == &class0 ? m0 : m1;
    for (const auto& p : *cls)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) cov[i][j] += (p[i] - m[i]) * (p[j] - m[j]);
  }
  const double dof = static_cast<double>(class0.size() + class1.size() - 2);
  for (auto& row : cov)
    for (auto& v : row) v /= dof;
  for (std::size_t i = 0; i < d; ++i) cov[i][i] += ridge;
  std::vector<double> diff(d);
  for (std::size_t i = 0; i < d; ++i) diff[i] = m1[i] - m0[i];
  return solve(cov, diff);
}

inline double angle_degrees(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double cosine = std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
  return std::acos(cosine) * 180.0 / std::numbers::pi;
}

}  // namespace acbeta::oracle
