#include "acbeta/regions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "acbeta/error.hpp"
#include "acbeta/manifest.hpp"
#include "json.hpp"

namespace acbeta {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::kEntireFrame: return "entire_frame";
    case RegionKind::kFace: return "face";
    case RegionKind::kFaceContour: return "face_contour";
    case RegionKind::kEyes: return "eyes";
    case RegionKind::kNose: return "nose";
    case RegionKind::kMouth: return "mouth";
    case RegionKind::kBackground: return "background";
  }
  return "unknown";
}

RegionKind parse_region(std::string_view text) {
  for (const auto kind : kAllRegions) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::kParseError, "unknown region '" + std::string(text) + "'");
}

// ---- sidecar I/O --------------------------------------------------------

LandmarkMap load_landmarks(const fs::path& sidecar) {
  std::ifstream in(sidecar);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open landmark sidecar " + sidecar.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, sidecar.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, sidecar.string() + ": expected an object");

  LandmarkMap landmarks;
  for (const auto& [key, value] : doc.items()) {
    if (key.empty() || key.size() > 9 ||
        !std::all_of(key.begin(), key.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw Error(ErrorCode::kParseError, sidecar.string() + ": bad frame key '" + key + "'");
    }
    if (!value.is_array()) throw Error(ErrorCode::kParseError, sidecar.string() + ": frame " + key);
    if (value.size() != kLandmarkCount) {
      throw Error(ErrorCode::kWrongPointCount, sidecar.string() + ": frame " + key + " has " +
                                                   std::to_string(value.size()) + " points");
    }
    LandmarkSet set;
    set.frame_index = std::stoi(key);
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      const auto& pair = value[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
        throw Error(ErrorCode::kParseError, sidecar.string() + ": frame " + key + " point " +
                                                std::to_string(i) + " is not an [x, y] pair");
      }
      set.points[i] = {pair[0].get<double>(), pair[1].get<double>()};
      if (!std::isfinite(set.points[i].x) || !std::isfinite(set.points[i].y)) {
        throw Error(ErrorCode::kParseError, sidecar.string() + ": non-finite coordinate");
      }
    }
    landmarks.emplace(set.frame_index, set);
  }
  return landmarks;
}

void save_landmarks(const LandmarkMap& landmarks, const fs::path& sidecar) {
  json doc = json::object();
  for (const auto& [index, set] : landmarks) {
    json points = json::array();
    for (const auto& p : set.points) points.push_back({p.x, p.y});
    doc[std::to_string(index)] = std::move(points);
  }
  if (sidecar.has_parent_path()) fs::create_directories(sidecar.parent_path());
  std::ofstream out(sidecar);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + sidecar.string());
  out << doc.dump() << '\n';
}

std::array<Point, kLandmarkCount> parse_landmark_text(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + file.string());
  std::vector<Point> points;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const char c = line[first];
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '-' && c != '+' && c != '.') continue;
    std::istringstream fields(line);
    Point p;
    if (!(fields >> p.x >> p.y)) {
      throw Error(ErrorCode::kParseError, file.string() + ": malformed line '" + line + "'");
    }
    points.push_back(p);
  }
  if (points.size() != kLandmarkCount) {
    throw Error(ErrorCode::kWrongPointCount,
                file.string() + " has " + std::to_string(points.size()) + " points");
  }
  std::array<Point, kLandmarkCount> out;
  std::copy(points.begin(), points.end(), out.begin());
  return out;
}

LandmarkMap import_landmark_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIoError, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() != ".json") files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());
  LandmarkMap landmarks;
  for (const auto& f : files) {
    const auto index = trailing_index(f);
    if (!index) continue;
    LandmarkSet set{*index, parse_landmark_text(f)};
    if (!landmarks.emplace(*index, set).second) {
      throw Error(ErrorCode::kParseError, "two files annotate frame " + std::to_string(*index));
    }
  }
  return landmarks;
}

// ---- geometry -----------------------------------------------------------

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double segment_distance(Point a, Point b, Point p) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

}  // namespace

std::vector<Point> convex_hull(std::span<const Point> points) {
  std::vector<Point> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(),
            [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() < 3) return sorted;

  // Monotone chain; collinear points are dropped, result is counter-clockwise.
  std::vector<Point> hull(2 * sorted.size());
  std::size_t k = 0;
  for (const auto& p : sorted) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = sorted.size() - 1, lower = k + 1; i-- > 0;) {
    const auto& p = sorted[i];
    while (k >= lower && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

double signed_distance(std::span<const Point> hull, Point p) {
  if (hull.empty()) return std::numeric_limits<double>::infinity();
  if (hull.size() == 1) return std::hypot(p.x - hull[0].x, p.y - hull[0].y);
  double nearest = std::numeric_limits<double>::infinity();
  bool inside = hull.size() >= 3;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point a = hull[i];
    const Point b = hull[(i + 1) % hull.size()];
    nearest = std::min(nearest, segment_distance(a, b, p));
    if (cross(a, b, p) < 0) inside = false;
  }
  return inside ? -nearest : nearest;
}

// ---- masks --------------------------------------------------------------

RegionMask::RegionMask(int width, int height, bool fill)
    : width_(width),
      height_(height),
      bits_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)),
            fill ? 1 : 0) {}

std::size_t RegionMask::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

namespace {

struct PixelBox {
  int x0, y0, x1, y1;  // inclusive, already clipped
  bool empty() const { return x0 > x1 || y0 > y1; }
};

PixelBox bounding_box(std::span<const Point> points, double margin, int width, int height) {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  auto clip = [](double v, int hi) {
    return static_cast<int>(std::clamp(v, -1.0, static_cast<double>(hi) + 1.0));
  };
  return {std::max(0, clip(std::floor(min_x - margin), width)),
          std::max(0, clip(std::floor(min_y - margin), height)),
          std::min(width - 1, clip(std::ceil(max_x + margin), width)),
          std::min(height - 1, clip(std::ceil(max_y + margin), height))};
}

// Pixels whose signed distance to the hull lies in (lower, upper].
void rasterize_band(RegionMask& mask, std::span<const Point> hull, double lower, double upper) {
  const PixelBox box = bounding_box(hull, std::max(upper, 0.0) + 1.0, mask.width(), mask.height());
  if (box.empty()) return;
  for (int y = box.y0; y <= box.y1; ++y) {
    for (int x = box.x0; x <= box.x1; ++x) {
      const double d = signed_distance(hull, {static_cast<double>(x), static_cast<double>(y)});
      if (d > lower && d <= upper) mask.set(x, y);
    }
  }
}

std::vector<Point> hull_of(const LandmarkSet& landmarks, std::size_t first, std::size_t last) {
  return convex_hull(std::span<const Point>(landmarks.points).subspan(first, last - first + 1));
}

std::size_t slot(RegionKind kind) { return static_cast<std::size_t>(kind); }

void check_frame(int width, int height) {
  if (width < 8 || height < 8) {
    throw Error(ErrorCode::kInvalidArgument, "frame must be at least 8x8");
  }
}

}  // namespace

std::array<std::optional<RegionMask>, 7> build_all_masks(int width, int height,
                                                         const LandmarkSet* landmarks,
                                                         const RegionGeometry& geometry) {
  check_frame(width, height);
  std::array<std::optional<RegionMask>, 7> masks;
  masks[slot(RegionKind::kEntireFrame)] = RegionMask(width, height, true);
  if (landmarks == nullptr) return masks;

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  const auto face_hull = hull_of(*landmarks, 0, 67);

  RegionMask face(width, height);
  rasterize_band(face, face_hull, kNegInf, 0.0);

  RegionMask eyes(width, height);
  rasterize_band(eyes, hull_of(*landmarks, 36, 41), kNegInf, geometry.part_dilation);
  rasterize_band(eyes, hull_of(*landmarks, 42, 47), kNegInf, geometry.part_dilation);
  RegionMask nose(width, height);
  rasterize_band(nose, hull_of(*landmarks, 27, 35), kNegInf, geometry.part_dilation);
  RegionMask mouth(width, height);
  rasterize_band(mouth, hull_of(*landmarks, 48, 67), kNegInf, geometry.part_dilation);
  RegionMask contour(width, height);
  rasterize_band(contour, face_hull, -geometry.contour_halfwidth, geometry.contour_halfwidth);

  // Precedence Eyes > Nose > Mouth > FaceContour; parts stay inside the face.
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const bool in_face = face.test(x, y);
      const bool e = eyes.test(x, y) && in_face;
      const bool n = nose.test(x, y) && in_face && !e;
      const bool m = mouth.test(x, y) && in_face && !e && !n;
      eyes.set(x, y, e);
      nose.set(x, y, n);
      mouth.set(x, y, m);
      if (e || n || m) contour.set(x, y, false);
    }
  }

  RegionMask background(width, height, true);
  const PixelBox box = bounding_box(landmarks->points, geometry.background_margin, width, height);
  for (int y = box.y0; y <= box.y1; ++y) {
    for (int x = box.x0; x <= box.x1; ++x) background.set(x, y, false);
  }

  auto keep = [&](RegionKind kind, RegionMask&& mask) {
    if (!mask.empty()) masks[slot(kind)] = std::move(mask);
  };
  keep(RegionKind::kFace, std::move(face));
  keep(RegionKind::kFaceContour, std::move(contour));
  keep(RegionKind::kEyes, std::move(eyes));
  keep(RegionKind::kNose, std::move(nose));
  keep(RegionKind::kMouth, std::move(mouth));
  keep(RegionKind::kBackground, std::move(background));
  return masks;
}

RegionMask build_mask(int width, int height, const LandmarkSet* landmarks, RegionKind kind,
                      const RegionGeometry& geometry) {
  check_frame(width, height);
  if (needs_landmarks(kind) && landmarks == nullptr) {
    throw Error(ErrorCode::kInvalidArgument,
                "region " + std::string(to_string(kind)) + " requires landmarks");
  }
  auto masks = build_all_masks(width, height, landmarks, geometry);
  auto& mask = masks[slot(kind)];
  if (!mask) {
    throw Error(ErrorCode::kDegenerateRegion,
                std::string(to_string(kind)) + " has no pixels inside the frame");
  }
  return std::move(*mask);
}

std::vector<Block8x8> extract_blocks(const GrayImage& image, const RegionMask& mask) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    throw Error(ErrorCode::kDimensionMismatch, "image and mask sizes differ");
  }
  std::vector<Block8x8> blocks;
  for (int by = 0; by + 8 <= image.height(); by += 8) {
    for (int bx = 0; bx + 8 <= image.width(); bx += 8) {
      bool covered = true;
      for (int dy = 0; dy < 8 && covered; ++dy) {
        for (int dx = 0; dx < 8; ++dx) {
          if (!mask.test(bx + dx, by + dy)) {
            covered = false;
            break;
          }
        }
      }
      if (!covered) continue;
      Block8x8 block;
      block.x = bx;
      block.y = by;
      for (int dy = 0; dy < 8; ++dy) {
        for (int dx = 0; dx < 8; ++dx) block.samples[dy * 8 + dx] = image.at(bx + dx, by + dy);
      }
      blocks.push_back(block);
    }
  }
  return blocks;
}

}  // namespace acbeta
