#pragma once

// Synthetic faces, frames and labeled corpora for tests.

#include <cstdint>
#include <filesystem>

#include "acbeta/image.hpp"
#include "acbeta/random.hpp"
#include "acbeta/regions.hpp"

namespace acbeta::synthetic {

/// 68 landmarks in canonical layout around (cx, cy); `scale` is roughly the
/// half-width of the face in pixels.
LandmarkSet canonical_landmarks(double cx, double cy, double scale, int frame_index = 0);

/// Mid-gray frame with broadband texture of the given amplitude.
GrayImage textured_frame(int width, int height, double amplitude, Rng& rng);

/// Box blur of radius `radius` applied only to pixels inside the face hull.
GrayImage blur_inside_face(const GrayImage& image, const LandmarkSet& landmarks, int radius);

struct CorpusSpec {
  int videos_per_class = 40;
  int frames_per_video = 3;
  int width = 320;
  int height = 320;
  double face_scale = 100.0;
  int blur_radius = 2;
  std::uint64_t seed = 1;
};

/// Writes root/real/<id>/frame_NNN.pgm and root/fake/<id>/... with a
/// landmarks.json in each video directory. Fake video i reuses the frames of
/// real video i, low-pass filtered inside the face.
void write_corpus(const std::filesystem::path& root, const CorpusSpec& spec);

}  // namespace acbeta::synthetic
