#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "acbeta/classifiers.hpp"
#include "acbeta/eval.hpp"
#include "acbeta/features.hpp"
#include "acbeta/manifest.hpp"

// Stage functions behind the command-line tool. Stages talk to each other
// only through files under an output directory:
//   manifest.json, features/<region>.csv, split.json, report.*, heatmap.svg

namespace acbeta {

enum class InputKind { kVideos, kFrames };

struct CorpusInput {
  InputKind kind = InputKind::kFrames;
  std::filesystem::path path;
  // Without a label the input must hold real/ and fake/ subdirectories.
  std::optional<Label> label;
};

struct IngestRequest {
  std::vector<CorpusInput> inputs;
  IngestPolicy policy = IngestPolicy::kAllFrames;
  IngestOptions options;
};

/// Ingests every input into out_dir/manifest.json (merging with an existing
/// one) and returns the merged manifest. Video inputs go through the
/// demuxer under the I-frame policy; frame directories always use the
/// all-frames policy. Throws Error(kIoError) naming a missing input path.
VideoManifest run_ingest(const IngestRequest& request, const std::filesystem::path& out_dir);

struct FeatureRun {
  FeatureResult result;
  std::vector<std::filesystem::path> written;
};

/// Extracts descriptors and writes features/<region>.csv for every region
/// that produced at least one descriptor. Throws Error(kNoPatches) when no
/// region produced any.
FeatureRun run_features(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir,
                        const FeatureOptions& options);

/// Reads features/<region>.csv for the requested regions; missing files are
/// skipped. Empty `regions` means every region file present.
std::map<RegionKind, Dataset> load_feature_tables(const std::filesystem::path& features_dir,
                                                  const std::vector<RegionKind>& regions = {});

/// Split over the union of videos in all tables. Throws
/// Error(kSchemaMismatch) when a video carries different labels.
SplitAssignment split_from_tables(const std::map<RegionKind, Dataset>& datasets, std::uint64_t seed);

struct EvaluateRequest {
  std::filesystem::path features_dir;
  std::vector<RegionKind> regions;     // empty: all seven regions
  std::vector<std::string> families{"knn", "lda", "decision_tree", "random_forest"};
  GridLayout layout = GridLayout::kSettings;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> split_path;  // computed from the tables if absent
  std::vector<ReportFormat> formats{ReportFormat::kCsv, ReportFormat::kJson, ReportFormat::kMarkdown};
  std::size_t jobs = 1;
};

/// Splits, evaluates the grid and writes report.{csv,json,md}, heatmap.svg
/// and split.json (when computed) under out_dir.
EvalGrid run_evaluate(const EvaluateRequest& request, const std::filesystem::path& out_dir);

// One JSON document driving run-all.
struct RunConfig {
  std::vector<CorpusInput> inputs;
  IngestPolicy policy = IngestPolicy::kAllFrames;
  std::vector<RegionKind> regions{kAllRegions.begin(), kAllRegions.end()};
  std::vector<std::string> classifiers{"knn", "lda", "decision_tree", "random_forest"};
  GridLayout layout = GridLayout::kSettings;
  std::uint64_t seed = 0;
  std::size_t min_blocks_per_patch = kDefaultMinBlocksPerPatch;
  bool pooled = false;
  std::filesystem::path output_dir;
  std::string log_level = "info";
  std::size_t jobs = 1;
  std::string demuxer{kDefaultDemuxerTemplate};
  std::optional<std::size_t> max_frames_per_video;
  std::vector<ReportFormat> formats{ReportFormat::kCsv, ReportFormat::kJson, ReportFormat::kMarkdown};
};

/// Relative paths are resolved against the config file's directory. "seed"
/// and "output_dir" are required; "regions" must be nonempty.
RunConfig load_run_config(const std::filesystem::path& path);

EvalGrid run_all(const RunConfig& config);

}  // namespace acbeta
