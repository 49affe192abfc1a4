#include "synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <span>
#include <string>

namespace acbeta::synthetic {

namespace fs = std::filesystem;

LandmarkSet canonical_landmarks(double cx, double cy, double s, int frame_index) {
  LandmarkSet set;
  set.frame_index = frame_index;
  auto& p = set.points;
  const double pi = std::numbers::pi;
  for (int i = 0; i <= 16; ++i) {  // jaw, ear to ear through the chin
    const double t = pi * i / 16.0;
    p[i] = {cx - s * std::cos(t), cy + 1.1 * s * std::sin(t)};
  }
  for (int i = 0; i < 5; ++i) {  // brows
    const double x = 0.2 * s + 0.15 * s * i;
    const double y = cy - 0.55 * s - 0.05 * s * std::sin(pi * i / 4.0);
    p[21 - i] = {cx - x, y};
    p[22 + i] = {cx + x, y};
  }
  for (int i = 0; i < 4; ++i) p[27 + i] = {cx, cy - 0.4 * s + 0.15 * s * i};  // bridge
  for (int i = 0; i < 5; ++i) p[31 + i] = {cx - 0.2 * s + 0.1 * s * i, cy + 0.15 * s};
  for (int side = 0; side < 2; ++side) {  // eyes, six points each
    const double ex = side == 0 ? cx - 0.45 * s : cx + 0.45 * s;
    const double ey = cy - 0.3 * s;
    for (int i = 0; i < 6; ++i) {
      const double t = 2.0 * pi * i / 6.0;
      p[36 + 6 * side + i] = {ex - 0.2 * s * std::cos(t), ey - 0.09 * s * std::sin(t)};
    }
  }
  for (int i = 0; i < 12; ++i) {  // outer lip
    const double t = 2.0 * pi * i / 12.0;
    p[48 + i] = {cx - 0.35 * s * std::cos(t), cy + 0.55 * s - 0.12 * s * std::sin(t)};
  }
  for (int i = 0; i < 8; ++i) {  // inner lip
    const double t = 2.0 * pi * i / 8.0;
    p[60 + i] = {cx - 0.25 * s * std::cos(t), cy + 0.55 * s - 0.05 * s * std::sin(t)};
  }
  return set;
}

GrayImage textured_frame(int width, int height, double amplitude, Rng& rng) {
  GrayImage image(width, height);
  // A few random plane waves plus white noise.
  struct Wave {
    double fx, fy, phase, weight;
  };
  std::array<Wave, 6> waves{};
  for (auto& w : waves) {
    w = {rng.uniform01() * 0.9, rng.uniform01() * 0.9, rng.uniform01() * 2.0 * std::numbers::pi,
         0.3 + 0.4 * rng.uniform01()};
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 0.0;
      for (const auto& w : waves) v += w.weight * std::sin(w.fx * x + w.fy * y + w.phase);
      v = 128.0 + amplitude * (0.5 * v / waves.size() + (rng.uniform01() - 0.5));
      image.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return image;
}

GrayImage blur_inside_face(const GrayImage& image, const LandmarkSet& landmarks, int radius) {
  const auto hull = convex_hull(std::span<const Point>(landmarks.points));
  GrayImage out = image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (signed_distance(hull, {double(x), double(y)}) > 0.0) continue;
      int sum = 0;
      int count = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const int sx = std::clamp(x + dx, 0, image.width() - 1);
          const int sy = std::clamp(y + dy, 0, image.height() - 1);
          sum += image.at(sx, sy);
          ++count;
        }
      }
      out.at(x, y) = static_cast<std::uint8_t>((sum + count / 2) / count);
    }
  }
  return out;
}

void write_corpus(const fs::path& root, const CorpusSpec& spec) {
  for (int v = 0; v < spec.videos_per_class; ++v) {
    char id[32];
    std::snprintf(id, sizeof id, "%03d", v);
    const fs::path real_dir = root / "real" / (std::string("real_") + id);
    const fs::path fake_dir = root / "fake" / (std::string("fake_") + id);
    fs::create_directories(real_dir);
    fs::create_directories(fake_dir);

    Rng rng = Rng::derive(spec.seed, static_cast<std::uint64_t>(v));
    const double amplitude = 40.0 + 40.0 * rng.uniform01();
    LandmarkMap landmarks;
    for (int f = 0; f < spec.frames_per_video; ++f) {
      const double jitter_x = 4.0 * (rng.uniform01() - 0.5);
      const double jitter_y = 4.0 * (rng.uniform01() - 0.5);
      const auto lm = canonical_landmarks(spec.width / 2.0 + jitter_x, spec.height * 0.42 + jitter_y,
                                          spec.face_scale, f);
      landmarks.emplace(f, lm);
      const GrayImage frame = textured_frame(spec.width, spec.height, amplitude, rng);
      char name[32];
      std::snprintf(name, sizeof name, "frame_%03d.pgm", f);
      write_pgm(frame, real_dir / name);
      write_pgm(blur_inside_face(frame, lm, spec.blur_radius), fake_dir / name);
    }
    save_landmarks(landmarks, real_dir / "landmarks.json");
    save_landmarks(landmarks, fake_dir / "landmarks.json");
  }
}

}  // namespace acbeta::synthetic
