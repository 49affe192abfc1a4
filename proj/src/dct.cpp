#include "acbeta/dct.hpp"

#include <cmath>
#include <numbers>

namespace acbeta {

namespace {

// basis[k][n] = sqrt(2/N) * C(k) * cos((2n + 1) k pi / 2N); the 2D transform
// with prefactor (2/N) C(u) C(v) factors into two of these.
struct CosineTable {
  std::array<std::array<double, kBlockSize>, kBlockSize> basis{};

  CosineTable() {
    const double scale = std::sqrt(2.0 / kBlockSize);
    for (int k = 0; k < kBlockSize; ++k) {
      const double c = k == 0 ? 1.0 / std::numbers::sqrt2 : 1.0;
      for (int n = 0; n < kBlockSize; ++n) {
        basis[k][n] = scale * c * std::cos((2 * n + 1) * k * std::numbers::pi / (2.0 * kBlockSize));
      }
    }
  }
};

const CosineTable& table() {
  static const CosineTable instance;
  return instance;
}

}  // namespace

CoefficientMatrix dct_8x8(const std::array<double, kCoefficients>& samples) {
  const auto& basis = table().basis;
  // Rows first: tmp[row][v] = sum_col f[row][col] * basis[v][col].
  std::array<double, kCoefficients> tmp{};
  for (int row = 0; row < kBlockSize; ++row) {
    for (int v = 0; v < kBlockSize; ++v) {
      double acc = 0.0;
      for (int col = 0; col < kBlockSize; ++col) acc += samples[row * kBlockSize + col] * basis[v][col];
      tmp[row * kBlockSize + v] = acc;
    }
  }
  CoefficientMatrix out{};
  for (int u = 0; u < kBlockSize; ++u) {
    for (int v = 0; v < kBlockSize; ++v) {
      double acc = 0.0;
      for (int row = 0; row < kBlockSize; ++row) acc += basis[u][row] * tmp[row * kBlockSize + v];
      out[u * kBlockSize + v] = acc;
    }
  }
  return out;
}

CoefficientMatrix dct_8x8(const Block8x8& block) {
  std::array<double, kCoefficients> centered{};
  for (std::size_t i = 0; i < kCoefficients; ++i) centered[i] = static_cast<double>(block.samples[i]) - 128.0;
  return dct_8x8(centered);
}

SpectrumBlock zigzag(const CoefficientMatrix& matrix) {
  SpectrumBlock out{};
  for (std::size_t i = 0; i < kCoefficients; ++i) out[i] = matrix[kZigzag[i]];
  return out;
}

CoefficientMatrix inverse_zigzag(const SpectrumBlock& spectrum) {
  CoefficientMatrix out{};
  for (std::size_t i = 0; i < kCoefficients; ++i) out[kZigzag[i]] = spectrum[i];
  return out;
}

}  // namespace acbeta
