#include "acbeta/features.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "acbeta/error.hpp"
#include "acbeta/parallel.hpp"

namespace acbeta {

namespace fs = std::filesystem;

BetaVector estimate_betas(std::span<const SpectrumBlock> blocks, std::size_t min_blocks) {
  if (blocks.empty() || blocks.size() < min_blocks) {
    throw Error(ErrorCode::kTooFewBlocks, std::to_string(blocks.size()) + " blocks, need " +
                                              std::to_string(std::max<std::size_t>(min_blocks, 1)));
  }
  const double n = static_cast<double>(blocks.size());
  BetaVector out;
  out.block_count = blocks.size();
  for (std::size_t i = 1; i < kCoefficients; ++i) {
    double sum = 0.0;
    for (const auto& b : blocks) sum += b[i];
    const double mean = sum / n;
    double squares = 0.0;
    for (const auto& b : blocks) {
      const double d = b[i] - mean;
      squares += d * d;
    }
    out.betas[i - 1] = std::sqrt(squares / n) / std::numbers::sqrt2;
  }
  return out;
}

std::vector<SpectrumBlock> block_spectra(const GrayImage& image, const RegionMask& mask) {
  const auto blocks = extract_blocks(image, mask);
  std::vector<SpectrumBlock> spectra;
  spectra.reserve(blocks.size());
  for (const auto& b : blocks) spectra.push_back(zigzag(dct_8x8(b)));
  return spectra;
}

std::optional<BetaVector> patch_vector(const GrayImage& image, const RegionMask& mask,
                                       std::size_t min_blocks) {
  const auto spectra = block_spectra(image, mask);
  if (spectra.empty() || spectra.size() < min_blocks) return std::nullopt;
  return estimate_betas(spectra, min_blocks);
}

VideoDescriptor video_descriptor(const VideoEntry& video, RegionKind region,
                                 std::span<const BetaVector> patches) {
  if (patches.empty()) {
    throw Error(ErrorCode::kNoPatches, video.video_id + " has no valid " +
                                           std::string(to_string(region)) + " patches");
  }
  VideoDescriptor d{video.video_id, region, {}, patches.size(), video.label};
  for (const auto& p : patches) {
    for (std::size_t i = 0; i < kAcCoefficients; ++i) d.mean_betas[i] += p.betas[i];
  }
  for (auto& v : d.mean_betas) v /= static_cast<double>(patches.size());
  return d;
}

// ---- CSV ----------------------------------------------------------------

namespace {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string header_line() {
  std::string header = "video_id,label,region,patch_count";
  char name[16];
  for (std::size_t i = 1; i <= kAcCoefficients; ++i) {
    std::snprintf(name, sizeof name, ",beta_%02zu", i);
    header += name;
  }
  return header;
}

}  // namespace

void write_feature_csv(std::span<const VideoDescriptor> rows, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << header_line() << '\n';
  for (const auto& r : rows) {
    if (r.video_id.find_first_of(",\n\r") != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "video_id '" + r.video_id + "' contains a CSV delimiter");
    }
    out << r.video_id << ',' << to_string(r.label) << ',' << to_string(r.region) << ','
        << r.patch_count;
    for (const double b : r.mean_betas) out << ',' << format_real(b);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

std::vector<VideoDescriptor> read_feature_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParseError, path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header_line()) throw Error(ErrorCode::kParseError, path.string() + ": unexpected header");

  std::vector<VideoDescriptor> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::kParseError, path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() != 4 + kAcCoefficients) fail("expected 67 fields");
    VideoDescriptor d;
    d.video_id = fields[0];
    d.label = parse_label(fields[1]);
    d.region = parse_region(fields[2]);
    char* end = nullptr;
    const unsigned long long count = std::strtoull(fields[3].c_str(), &end, 10);
    if (end == fields[3].c_str() || *end != '\0' || count == 0) fail("bad patch_count");
    d.patch_count = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < kAcCoefficients; ++i) {
      const auto& f = fields[4 + i];
      const double v = std::strtod(f.c_str(), &end);
      if (end == f.c_str() || *end != '\0' || !std::isfinite(v) || v < 0.0) fail("bad beta value '" + f + "'");
      d.mean_betas[i] = v;
    }
    rows.push_back(std::move(d));
  }
  return rows;
}

// ---- corpus extraction --------------------------------------------------

namespace {

struct VideoResult {
  std::map<RegionKind, VideoDescriptor> descriptors;
  std::vector<std::string> warnings;
};

VideoResult process_video(const VideoEntry& video, const fs::path& root, const FeatureOptions& options) {
  VideoResult result;
  LandmarkMap landmarks;
  if (video.landmark_sidecar) landmarks = load_landmarks(root / *video.landmark_sidecar);

  std::map<RegionKind, std::vector<BetaVector>> patches;
  std::map<RegionKind, std::vector<SpectrumBlock>> pooled;
  std::map<RegionKind, std::size_t> pooled_patches;
  for (const auto& frame : video.frames) {
    const GrayImage image = decode_grayscale(root / frame.path);
    if (image.width() < kBlockSize || image.height() < kBlockSize) {
      result.warnings.push_back(video.video_id + ": frame " + std::to_string(frame.frame_index) +
                                " is smaller than 8x8, skipped");
      continue;
    }
    const auto it = landmarks.find(frame.frame_index);
    const LandmarkSet* frame_landmarks = it == landmarks.end() ? nullptr : &it->second;
    const auto masks = build_all_masks(image.width(), image.height(), frame_landmarks, options.geometry);

    for (const auto region : options.regions) {
      const auto& mask = masks[static_cast<std::size_t>(region)];
      if (!mask) continue;
      auto spectra = block_spectra(image, *mask);
      if (options.pooled) {
        if (spectra.empty()) continue;
        auto& pool = pooled[region];
        pool.insert(pool.end(), spectra.begin(), spectra.end());
        ++pooled_patches[region];
      } else if (!spectra.empty() && spectra.size() >= options.min_blocks_per_patch) {
        patches[region].push_back(estimate_betas(spectra, options.min_blocks_per_patch));
      }
    }
  }

  for (const auto region : options.regions) {
    try {
      if (options.pooled) {
        const auto& pool = pooled[region];
        if (pool.empty() || pool.size() < options.min_blocks_per_patch) {
          throw Error(ErrorCode::kNoPatches, video.video_id + " has too few pooled " +
                                                 std::string(to_string(region)) + " blocks");
        }
        const BetaVector all = estimate_betas(pool, options.min_blocks_per_patch);
        VideoDescriptor d{video.video_id, region, all.betas, pooled_patches[region], video.label};
        result.descriptors.emplace(region, d);
      } else {
        result.descriptors.emplace(region, video_descriptor(video, region, patches[region]));
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoPatches) throw;
      result.warnings.push_back(e.what());
    }
  }
  return result;
}

}  // namespace

FeatureResult extract_features(const VideoManifest& manifest, const fs::path& corpus_root,
                               const FeatureOptions& options) {
  std::vector<VideoResult> per_video(manifest.entries.size());
  parallel_for(manifest.entries.size(), options.jobs, [&](std::size_t i) {
    per_video[i] = process_video(manifest.entries[i], corpus_root, options);
  });

  FeatureResult result;
  for (const auto region : options.regions) result.descriptors[region];
  for (auto& video : per_video) {
    for (auto& [region, d] : video.descriptors) result.descriptors[region].push_back(std::move(d));
    for (auto& w : video.warnings) {
      spdlog::warn("{}", w);
      result.warnings.push_back(std::move(w));
    }
  }
  return result;
}

}  // namespace acbeta
