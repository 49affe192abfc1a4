#pragma once

#include <array>
#include <cstddef>

#include "acbeta/regions.hpp"

namespace acbeta {

inline constexpr int kBlockSize = 8;
inline constexpr std::size_t kCoefficients = 64;
inline constexpr std::size_t kAcCoefficients = 63;

// Row-major 8x8 coefficients: element [u * 8 + v] is the basis with vertical
// frequency u (rows) and horizontal frequency v (columns).
using CoefficientMatrix = std::array<double, kCoefficients>;

// The same 64 coefficients in zigzag scan order; index 0 is DC.
using SpectrumBlock = std::array<double, kCoefficients>;

namespace detail {

constexpr std::array<std::size_t, kCoefficients> make_zigzag() {
  std::array<std::size_t, kCoefficients> order{};
  std::size_t n = 0;
  for (int diagonal = 0; diagonal < 2 * kBlockSize - 1; ++diagonal) {
    // Even diagonals run bottom-left to top-right, odd ones the other way.
    for (int step = 0; step <= diagonal; ++step) {
      const int row = diagonal % 2 == 0 ? diagonal - step : step;
      const int col = diagonal - row;
      if (row < kBlockSize && col < kBlockSize) {
        order[n++] = static_cast<std::size_t>(row * kBlockSize + col);
      }
    }
  }
  return order;
}

}  // namespace detail

/// kZigzag[i] is the row-major position of the i-th coefficient in scan order.
inline constexpr std::array<std::size_t, kCoefficients> kZigzag = detail::make_zigzag();

/// Orthonormal 8x8 forward DCT-II of a level-shifted block (samples - 128).
/// Separable evaluation with a precomputed cosine table.
CoefficientMatrix dct_8x8(const Block8x8& block);

/// Same transform applied to arbitrary real samples, no level shift.
CoefficientMatrix dct_8x8(const std::array<double, kCoefficients>& samples);

SpectrumBlock zigzag(const CoefficientMatrix& matrix);
CoefficientMatrix inverse_zigzag(const SpectrumBlock& spectrum);

}  // namespace acbeta
