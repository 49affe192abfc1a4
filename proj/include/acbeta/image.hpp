#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace acbeta {

// Single-channel 8-bit frame, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  std::uint8_t at(int x, int y) const { return samples_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return samples_[index(x, y)]; }

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> samples_;
};

// BT.601 luma, rounded half up. Integer arithmetic keeps it exact.
constexpr std::uint8_t luma_bt601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const unsigned weighted = 299u * r + 587u * g + 114u * b;
  const unsigned value = (weighted + 500u) / 1000u;
  return static_cast<std::uint8_t>(value > 255u ? 255u : value);
}

/// Decodes a PNG, PGM (P2/P5) or PPM (P3/P6) file to grayscale. Color
/// sources are converted with luma_bt601; 8-bit single-channel sources pass
/// through unchanged. 16-bit samples are reduced to 8 bits first and alpha is
/// dropped. Throws Error(kDecodeError).
GrayImage decode_grayscale(const std::filesystem::path& path);

/// Writes a binary (P5) PGM. Throws Error(kIoError).
void write_pgm(const GrayImage& image, const std::filesystem::path& path);

bool is_supported_image(const std::filesystem::path& path);

}  // namespace acbeta
