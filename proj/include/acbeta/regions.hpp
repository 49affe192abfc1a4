#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "acbeta/image.hpp"

namespace acbeta {

enum class RegionKind { kEntireFrame, kFace, kFaceContour, kEyes, kNose, kMouth, kBackground };

inline constexpr std::array<RegionKind, 7> kAllRegions = {
    RegionKind::kEntireFrame, RegionKind::kFace,  RegionKind::kFaceContour, RegionKind::kEyes,
    RegionKind::kNose,        RegionKind::kMouth, RegionKind::kBackground};

// snake_case names used in file names, CSV columns and CLI flags.
std::string_view to_string(RegionKind kind);
RegionKind parse_region(std::string_view text);  // throws Error(kParseError)

constexpr bool needs_landmarks(RegionKind kind) { return kind != RegionKind::kEntireFrame; }

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

inline constexpr std::size_t kLandmarkCount = 68;

// 68-point annotation (iBUG convention, zero-based): 0-16 jaw, 17-26 brows,
// 27-35 nose, 36-41 / 42-47 eyes, 48-67 mouth.
struct LandmarkSet {
  int frame_index = 0;
  std::array<Point, kLandmarkCount> points{};
  friend bool operator==(const LandmarkSet&, const LandmarkSet&) = default;
};

using LandmarkMap = std::map<int, LandmarkSet>;

/// Sidecar JSON: {"<frame_index>": [[x, y], ... 68 pairs], ...}.
/// Throws Error(kParseError) or Error(kWrongPointCount).
LandmarkMap load_landmarks(const std::filesystem::path& sidecar);
void save_landmarks(const LandmarkMap& landmarks, const std::filesystem::path& sidecar);

/// Reads one frame of the plain-text format: 68 lines of "x y". Lines that
/// do not start with a number (e.g. .pts headers and braces) are ignored.
std::array<Point, kLandmarkCount> parse_landmark_text(const std::filesystem::path& file);

/// Converts a directory of per-frame text files into a landmark map. The
/// frame index is taken from the trailing digits of each file name.
LandmarkMap import_landmark_directory(const std::filesystem::path& dir);

class RegionMask {
 public:
  RegionMask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool test(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool value = true) { bits_[index(x, y)] = value ? 1 : 0; }

  std::size_t popcount() const;
  bool empty() const { return popcount() == 0; }

  friend bool operator==(const RegionMask&, const RegionMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> bits_;
};

// Geometry constants for the face-derived regions, in pixels.
struct RegionGeometry {
  double part_dilation = 4.0;     // eyes, nose, mouth
  double contour_halfwidth = 8.0;  // ring around the face hull boundary
  int background_margin = 16;     // expansion of the face bounding box
};

/// Builds the mask of one region. EntireFrame ignores `landmarks`, which may
/// then be null; every other kind requires them. Throws
/// Error(kDegenerateRegion) when the region has no pixel inside the frame and
/// Error(kInvalidArgument) for frames smaller than 8x8 or missing landmarks.
RegionMask build_mask(int width, int height, const LandmarkSet* landmarks, RegionKind kind,
                      const RegionGeometry& geometry = {});

/// All seven masks for one frame, built in a single pass. Degenerate regions
/// come back as nullopt rather than throwing. Without landmarks only
/// EntireFrame is present.
std::array<std::optional<RegionMask>, 7> build_all_masks(int width, int height,
                                                         const LandmarkSet* landmarks,
                                                         const RegionGeometry& geometry = {});

struct Block8x8 {
  std::array<std::uint8_t, 64> samples{};  // row-major
  int x = 0;                               // origin of the top-left pixel
  int y = 0;
};

/// Frame-aligned 8x8 grid blocks whose 64 pixels are all inside the mask,
/// row-major by origin.
std::vector<Block8x8> extract_blocks(const GrayImage& image, const RegionMask& mask);

// ---- exposed for tests ----

std::vector<Point> convex_hull(std::span<const Point> points);

/// Negative inside the hull (distance to its boundary), positive outside.
/// Hulls of one or two points are treated as a point or segment.
double signed_distance(std::span<const Point> hull, Point p);

}  // namespace acbeta
