#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acbeta/dct.hpp"
#include "acbeta/image.hpp"
#include "acbeta/manifest.hpp"
#include "acbeta/regions.hpp"

namespace acbeta {

inline constexpr std::size_t kDefaultMinBlocksPerPatch = 8;

using BetaArray = std::array<double, kAcCoefficients>;

// Laplacian scale of each AC coefficient (zigzag positions 1..63) over one
// patch's blocks.
struct BetaVector {
  BetaArray betas{};
  std::size_t block_count = 0;
};

struct VideoDescriptor {
  std::string video_id;
  RegionKind region = RegionKind::kEntireFrame;
  BetaArray mean_betas{};
  std::size_t patch_count = 0;
  Label label = Label::kReal;

  friend bool operator==(const VideoDescriptor&, const VideoDescriptor&) = default;
};

/// beta_i = sigma_i / sqrt(2), sigma_i the population standard deviation of
/// AC coefficient i across `blocks`. DC is ignored. Constant coefficients
/// give 0. Throws Error(kTooFewBlocks) below `min_blocks`.
BetaVector estimate_betas(std::span<const SpectrumBlock> blocks,
                          std::size_t min_blocks = kDefaultMinBlocksPerPatch);

/// Zigzag spectra of every fully covered block of the mask.
std::vector<SpectrumBlock> block_spectra(const GrayImage& image, const RegionMask& mask);

/// Blocks -> DCT -> zigzag -> betas; nullopt when fewer than `min_blocks`
/// blocks are fully inside the mask.
std::optional<BetaVector> patch_vector(const GrayImage& image, const RegionMask& mask,
                                       std::size_t min_blocks = kDefaultMinBlocksPerPatch);

/// Unweighted per-component mean over patches, summed in the given order.
/// Throws Error(kNoPatches) for an empty list.
VideoDescriptor video_descriptor(const VideoEntry& video, RegionKind region,
                                 std::span<const BetaVector> patches);

// ---- feature table (one CSV per region) ----

/// Header: video_id,label,region,patch_count,beta_01..beta_63. Reals are
/// written with 17 significant digits.
void write_feature_csv(std::span<const VideoDescriptor> rows, const std::filesystem::path& path);
std::vector<VideoDescriptor> read_feature_csv(const std::filesystem::path& path);

// ---- corpus extraction ----

struct FeatureOptions {
  std::vector<RegionKind> regions{kAllRegions.begin(), kAllRegions.end()};
  std::size_t min_blocks_per_patch = kDefaultMinBlocksPerPatch;
  // Pool every block of every patch of a video before estimating, instead
  // of averaging per-patch estimates.
  bool pooled = false;
  RegionGeometry geometry{};
  std::size_t jobs = 1;
};

struct FeatureResult {
  // Descriptors per requested region, in manifest order. Videos without a
  // single valid patch for a region are left out.
  std::map<RegionKind, std::vector<VideoDescriptor>> descriptors;
  std::vector<std::string> warnings;
};

FeatureResult extract_features(const VideoManifest& manifest, const std::filesystem::path& corpus_root,
                               const FeatureOptions& options);

}  // namespace acbeta
