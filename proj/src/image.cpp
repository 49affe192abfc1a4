#include "acbeta/image.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <csetjmp>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <string>

#include "acbeta/error.hpp"

namespace acbeta {

namespace fs = std::filesystem;

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width),
      height_(height),
      samples_(static_cast<std::size_t>(std::max(width, 0)) *
                   static_cast<std::size_t>(std::max(height, 0)),
               fill) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidArgument, "negative image dimensions");
  }
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < 0 || height < 0 ||
      samples_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::kInvalidArgument, "sample count does not match width x height");
  }
}

namespace {

[[noreturn]] void decode_fail(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::kDecodeError, path.string() + ": " + what);
}

// ---- PNM ----------------------------------------------------------------

class PnmReader {
 public:
  PnmReader(std::string data, const fs::path& path) : data_(std::move(data)), path_(path) {}

  std::string magic() {
    if (data_.size() < 2) decode_fail(path_, "truncated header");
    pos_ = 2;
    return data_.substr(0, 2);
  }

  unsigned header_int() {
    skip_space_and_comments();
    if (pos_ >= data_.size() || !std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      decode_fail(path_, "malformed header");
    }
    unsigned long value = 0;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      value = value * 10 + static_cast<unsigned>(data_[pos_] - '0');
      if (value > 1u << 24) decode_fail(path_, "header value out of range");
      ++pos_;
    }
    return static_cast<unsigned>(value);
  }

  // Exactly one whitespace byte separates the header from binary raster data.
  void end_of_header() {
    if (pos_ >= data_.size() || !std::isspace(static_cast<unsigned char>(data_[pos_]))) {
      decode_fail(path_, "missing raster separator");
    }
    ++pos_;
  }

  unsigned binary_sample(unsigned maxval) {
    if (maxval < 256) {
      if (pos_ >= data_.size()) decode_fail(path_, "truncated raster");
      return static_cast<unsigned char>(data_[pos_++]);
    }
    if (pos_ + 1 >= data_.size()) decode_fail(path_, "truncated raster");
    const unsigned hi = static_cast<unsigned char>(data_[pos_]);
    const unsigned lo = static_cast<unsigned char>(data_[pos_ + 1]);
    pos_ += 2;
    return hi << 8 | lo;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string data_;
  fs::path path_;
  std::size_t pos_ = 0;
};

std::uint8_t to_8bit(unsigned value, unsigned maxval) {
  if (value > maxval) value = maxval;
  if (maxval <= 255) return static_cast<std::uint8_t>(value);
  return static_cast<std::uint8_t>((value * 255u + maxval / 2) / maxval);
}

GrayImage decode_pnm(const fs::path& path, std::string data) {
  PnmReader reader(std::move(data), path);
  const std::string magic = reader.magic();
  const bool ascii = magic == "P2" || magic == "P3";
  const bool color = magic == "P3" || magic == "P6";
  if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
    decode_fail(path, "unsupported PNM variant " + magic);
  }
  const unsigned width = reader.header_int();
  const unsigned height = reader.header_int();
  const unsigned maxval = reader.header_int();
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
    decode_fail(path, "invalid dimensions or maxval");
  }
  if (!ascii) reader.end_of_header();

  auto next = [&]() { return ascii ? reader.header_int() : reader.binary_sample(maxval); };

  std::vector<std::uint8_t> samples(static_cast<std::size_t>(width) * height);
  for (auto& s : samples) {
    if (color) {
      const auto r = to_8bit(next(), maxval);
      const auto g = to_8bit(next(), maxval);
      const auto b = to_8bit(next(), maxval);
      s = luma_bt601(r, g, b);
    } else {
      s = to_8bit(next(), maxval);
    }
  }
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(samples));
}

// ---- PNG ----------------------------------------------------------------

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

GrayImage decode_png(const fs::path& path) {
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.c_str(), "rb"));
  if (!file) decode_fail(path, "cannot open");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) decode_fail(path, "libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    decode_fail(path, "libpng init failed");
  }

  // Raw buffers only inside the setjmp region; longjmp skips destructors.
  png_bytep raster = nullptr;
  png_bytepp rows = nullptr;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;

  if (setjmp(png_jmpbuf(png))) {
    std::free(raster);
    std::free(rows);
    png_destroy_read_struct(&png, &info, nullptr);
    decode_fail(path, "corrupt PNG");
  }

  png_init_io(png, file.get());
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  channels = png_get_channels(png, info);

  const png_size_t row_bytes = png_get_rowbytes(png, info);
  raster = static_cast<png_bytep>(std::malloc(row_bytes * height));
  rows = static_cast<png_bytepp>(std::malloc(sizeof(png_bytep) * height));
  if (!raster || !rows) png_error(png, "out of memory");
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = raster + y * row_bytes;
  png_read_image(png, rows);
  png_read_end(png, nullptr);

  std::vector<std::uint8_t> samples(static_cast<std::size_t>(width) * height);
  for (png_uint_32 y = 0; y < height; ++y) {
    const png_bytep row = rows[y];
    for (png_uint_32 x = 0; x < width; ++x) {
      std::uint8_t value;
      if (channels >= 3) {
        value = luma_bt601(row[x * channels], row[x * channels + 1], row[x * channels + 2]);
      } else {
        value = row[x * channels];
      }
      samples[static_cast<std::size_t>(y) * width + x] = value;
    }
  }
  std::free(raster);
  std::free(rows);
  png_destroy_read_struct(&png, &info, nullptr);
  return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(samples));
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) decode_fail(path, "cannot open");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

GrayImage decode_grayscale(const fs::path& path) {
  std::array<unsigned char, 8> signature{};
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) decode_fail(path, "cannot open");
    in.read(reinterpret_cast<char*>(signature.data()), signature.size());
    if (in.gcount() < 2) decode_fail(path, "file too short");
  }
  if (png_sig_cmp(signature.data(), 0, signature.size()) == 0) return decode_png(path);
  if (signature[0] == 'P') return decode_pnm(path, read_all(path));
  decode_fail(path, "unrecognized image format");
}

void write_pgm(const GrayImage& image, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  const auto samples = image.samples();
  out.write(reinterpret_cast<const char*>(samples.data()),
            static_cast<std::streamsize>(samples.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

bool is_supported_image(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

}  // namespace acbeta
