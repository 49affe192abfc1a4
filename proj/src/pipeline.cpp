#include "acbeta/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "acbeta/error.hpp"
#include "json.hpp"

namespace acbeta {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_video_file(const fs::path& path) {
  static const std::set<std::string> kExtensions = {".mp4", ".avi", ".mov", ".mkv", ".webm", ".m4v",
                                                    ".mpg", ".mpeg", ".ts", ".flv", ".wmv", ".y4m"};
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return kExtensions.contains(ext);
}

bool holds_images(const fs::path& dir) {
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && is_supported_image(item.path())) return true;
  }
  return false;
}

std::vector<fs::path> sorted_children(const fs::path& dir, bool directories) {
  std::vector<fs::path> out;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (directories ? item.is_directory() : item.is_regular_file()) out.push_back(item.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// (path, label) pairs for one input, expanding the real/ + fake/ layout.
std::vector<std::pair<fs::path, Label>> labeled_roots(const CorpusInput& input) {
  if (!fs::exists(input.path)) throw Error(ErrorCode::kIoError, "input path does not exist: " + input.path.string());
  if (input.label) return {{input.path, *input.label}};
  if (fs::is_directory(input.path / "real") && fs::is_directory(input.path / "fake")) {
    return {{input.path / "real", Label::kReal}, {input.path / "fake", Label::kFake}};
  }
  throw Error(ErrorCode::kInvalidArgument,
              input.path.string() + ": give a label or provide real/ and fake/ subdirectories");
}

}  // namespace

VideoManifest run_ingest(const IngestRequest& request, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const fs::path manifest_path = out_dir / "manifest.json";

  std::vector<VideoSource> videos;
  std::vector<VideoEntry> frame_entries;
  for (const auto& input : request.inputs) {
    for (const auto& [root, label] : labeled_roots(input)) {
      if (input.kind == InputKind::kVideos) {
        if (request.policy != IngestPolicy::kIFrames) {
          throw Error(ErrorCode::kInvalidArgument, "video inputs require the 'iframes' policy");
        }
        if (fs::is_regular_file(root)) {
          videos.push_back({root, label});
        } else {
          for (const auto& f : sorted_children(root, false)) {
            if (is_video_file(f)) videos.push_back({f, label});
          }
        }
      } else if (holds_images(root)) {
        frame_entries.push_back(
            ingest_frame_directory(root, label, out_dir, request.options.max_frames_per_video));
      } else {
        for (const auto& dir : sorted_children(root, true)) {
          if (holds_images(dir)) {
            frame_entries.push_back(
                ingest_frame_directory(dir, label, out_dir, request.options.max_frames_per_video));
          }
        }
      }
    }
  }

  VideoManifest manifest;
  if (!videos.empty()) {
    manifest = ingest_videos(videos, out_dir, request.options).manifest;
  } else if (fs::exists(manifest_path)) {
    manifest = load_manifest(manifest_path);
  }
  merge_entries(manifest, std::move(frame_entries));
  save_manifest(manifest, manifest_path);
  return manifest;
}

FeatureRun run_features(const fs::path& manifest_path, const fs::path& out_dir, const FeatureOptions& options) {
  const VideoManifest manifest = load_manifest(manifest_path);
  FeatureRun run;
  run.result = extract_features(manifest, resolved_root(manifest, manifest_path), options);

  std::size_t total = 0;
  for (const auto region : options.regions) {
    const auto& rows = run.result.descriptors[region];
    if (rows.empty()) {
      spdlog::warn("region {} produced no descriptors{}; no feature table written", to_string(region),
                   needs_landmarks(region) ? " (landmark sidecars missing?)" : "");
      continue;
    }
    const fs::path path = out_dir / "features" / (std::string(to_string(region)) + ".csv");
    write_feature_csv(rows, path);
    run.written.push_back(path);
    total += rows.size();
  }
  if (total == 0) throw Error(ErrorCode::kNoPatches, "no descriptors produced for any region");
  return run;
}

std::map<RegionKind, Dataset> load_feature_tables(const fs::path& features_dir,
                                                  const std::vector<RegionKind>& regions) {
  if (!fs::is_directory(features_dir)) {
    throw Error(ErrorCode::kIoError, "feature directory does not exist: " + features_dir.string());
  }
  const std::vector<RegionKind> wanted =
      regions.empty() ? std::vector<RegionKind>(kAllRegions.begin(), kAllRegions.end()) : regions;
  std::map<RegionKind, Dataset> datasets;
  for (const auto region : wanted) {
    const fs::path path = features_dir / (std::string(to_string(region)) + ".csv");
    if (!fs::exists(path)) {
      if (!regions.empty()) spdlog::warn("no feature table for region {}", to_string(region));
      continue;
    }
    datasets.emplace(region, make_dataset(region, read_feature_csv(path)));
  }
  return datasets;
}

SplitAssignment split_from_tables(const std::map<RegionKind, Dataset>& datasets, std::uint64_t seed) {
  std::map<std::string, Label> labels;
  for (const auto& [region, dataset] : datasets) {
    for (const auto& row : dataset.rows) {
      const auto [it, inserted] = labels.emplace(row.video_id, row.label);
      if (!inserted && it->second != row.label) {
        throw Error(ErrorCode::kSchemaMismatch, "video '" + row.video_id + "' has conflicting labels");
      }
    }
  }
  std::vector<LabeledVideo> videos;
  for (const auto& [id, label] : labels) videos.push_back({id, label});
  return stratified_split(videos, seed);
}

EvalGrid run_evaluate(const EvaluateRequest& request, const fs::path& out_dir) {
  const auto datasets = load_feature_tables(request.features_dir, request.regions);
  if (datasets.empty()) throw Error(ErrorCode::kIoError, "no feature tables in " + request.features_dir.string());

  SplitAssignment split;
  if (request.split_path) {
    split = load_split(*request.split_path);
  } else {
    split = split_from_tables(datasets, request.seed);
    save_split(split, out_dir / "split.json");
  }

  const std::vector<RegionKind> regions =
      request.regions.empty() ? std::vector<RegionKind>(kAllRegions.begin(), kAllRegions.end()) : request.regions;
  const auto rows = make_grid_rows(request.families, request.layout);
  const EvalGrid grid = evaluate_grid(datasets, regions, rows, split, request.seed, request.jobs);

  for (const auto format : request.formats) {
    const char* name = format == ReportFormat::kCsv ? "report.csv"
                       : format == ReportFormat::kJson ? "report.json"
                                                       : "report.md";
    emit_report(grid, format, out_dir / name);
  }
  emit_heatmap(grid, out_dir / "heatmap.svg");
  return grid;
}

// ---- run config ---------------------------------------------------------

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config " + path.string());
  const fs::path base = path.parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  RunConfig config;
  try {
    const json doc = json::parse(in);
    if (!doc.contains("seed")) throw Error(ErrorCode::kParseError, "config must set an explicit seed");
    if (!doc.contains("output_dir")) throw Error(ErrorCode::kParseError, "config must set output_dir");
    config.seed = doc.at("seed").get<std::uint64_t>();
    config.output_dir = resolve(doc.at("output_dir").get<std::string>());
    for (const auto& item : doc.at("inputs")) {
      CorpusInput input;
      if (item.contains("frames")) {
        input.kind = InputKind::kFrames;
        input.path = resolve(item.at("frames").get<std::string>());
      } else {
        input.kind = InputKind::kVideos;
        input.path = resolve(item.at("videos").get<std::string>());
      }
      if (item.contains("label")) input.label = parse_label(item.at("label").get<std::string>());
      config.inputs.push_back(std::move(input));
    }
    if (doc.contains("policy")) config.policy = parse_ingest_policy(doc.at("policy").get<std::string>());
    if (doc.contains("regions")) {
      const auto& regions = doc.at("regions");
      if (!(regions.is_string() && regions.get<std::string>() == "all")) {
        config.regions.clear();
        for (const auto& r : regions) config.regions.push_back(parse_region(r.get<std::string>()));
      }
    }
    if (doc.contains("classifiers")) config.classifiers = doc.at("classifiers").get<std::vector<std::string>>();
    if (doc.contains("layout")) config.layout = parse_layout(doc.at("layout").get<std::string>());
    config.min_blocks_per_patch = doc.value("min_blocks_per_patch", config.min_blocks_per_patch);
    config.pooled = doc.value("pooled", false);
    config.log_level = doc.value("log_level", config.log_level);
    config.jobs = doc.value("jobs", config.jobs);
    config.demuxer = doc.value("demuxer", config.demuxer);
    if (doc.contains("max_frames_per_video") && !doc.at("max_frames_per_video").is_null()) {
      config.max_frames_per_video = doc.at("max_frames_per_video").get<std::size_t>();
    }
    if (doc.contains("formats")) {
      config.formats.clear();
      for (const auto& f : doc.at("formats")) config.formats.push_back(parse_report_format(f.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  if (config.regions.empty()) throw Error(ErrorCode::kParseError, "config region list is empty");
  if (config.classifiers.empty()) throw Error(ErrorCode::kParseError, "config classifier list is empty");
  return config;
}

EvalGrid run_all(const RunConfig& config) {
  IngestRequest ingest;
  ingest.inputs = config.inputs;
  ingest.policy = config.policy;
  ingest.options.demuxer_template = config.demuxer;
  ingest.options.max_frames_per_video = config.max_frames_per_video;
  ingest.options.jobs = config.jobs;
  run_ingest(ingest, config.output_dir);

  FeatureOptions features;
  features.regions = config.regions;
  features.min_blocks_per_patch = config.min_blocks_per_patch;
  features.pooled = config.pooled;
  features.jobs = config.jobs;
  run_features(config.output_dir / "manifest.json", config.output_dir, features);

  EvaluateRequest evaluate;
  evaluate.features_dir = config.output_dir / "features";
  evaluate.regions = config.regions;
  evaluate.families = config.classifiers;
  evaluate.layout = config.layout;
  evaluate.seed = config.seed;
  evaluate.formats = config.formats;
  evaluate.jobs = config.jobs;
  return run_evaluate(evaluate, config.output_dir / "report");
}

}  // namespace acbeta
