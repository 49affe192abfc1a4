// Command-line front end: ingest, landmarks-import, features, split, train,
// evaluate, run-all. Logs go to stderr; results go to files.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "acbeta/classifiers.hpp"
#include "acbeta/error.hpp"
#include "acbeta/eval.hpp"
#include "acbeta/features.hpp"
#include "acbeta/manifest.hpp"
#include "acbeta/pipeline.hpp"
#include "acbeta/regions.hpp"

namespace fs = std::filesystem;
using namespace acbeta;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::vector<RegionKind> parse_regions(const std::string& text) {
  if (text == "all") return {kAllRegions.begin(), kAllRegions.end()};
  std::vector<RegionKind> regions;
  for (const auto& name : split_list(text)) regions.push_back(parse_region(name));
  if (regions.empty()) throw Error(ErrorCode::kParseError, "region list is empty");
  return regions;
}

std::vector<std::string> parse_families(const std::string& text) {
  auto families = split_list(text);
  for (const auto& f : families) family_settings(f);  // validates
  if (families.empty()) throw Error(ErrorCode::kParseError, "classifier list is empty");
  return families;
}

std::vector<ReportFormat> parse_formats(const std::string& text) {
  std::vector<ReportFormat> formats;
  for (const auto& f : split_list(text)) formats.push_back(parse_report_format(f));
  return formats;
}

// Missing inputs are usage errors (exit 2), everything else exit 1.
void require_exists(const fs::path& path) {
  if (!fs::exists(path)) throw CLI::ValidationError("input path does not exist: " + path.string());
}

void print_grid_summary(const EvalGrid& grid) {
  const auto best = best_cell(grid);
  if (best) {
    std::cout << "best: " << best->classifier << " on " << to_string(best->region) << " AUC "
              << format_percent(*best->auc) << "%\n";
  } else {
    std::cout << "best: none (every cell absent)\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("acbeta");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Deepfake video detection from Laplacian statistics of block-DCT AC coefficients"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Dump I-frames and write a labeled manifest");
  std::vector<fs::path> ingest_videos_paths;
  std::vector<fs::path> ingest_frames_paths;
  fs::path ingest_out;
  std::string ingest_policy = "iframes";
  std::string ingest_label;
  std::string ingest_demuxer{kDefaultDemuxerTemplate};
  std::size_t ingest_max = 0;
  std::size_t ingest_jobs = 1;
  ingest->add_option("--videos", ingest_videos_paths, "video files or directories");
  ingest->add_option("--frames", ingest_frames_paths, "directories of frame images");
  ingest->add_option("--out", ingest_out, "output directory")->required();
  ingest->add_option("--policy", ingest_policy, "iframes | all")->capture_default_str();
  ingest->add_option("--label", ingest_label, "real | fake (default: real/ and fake/ subdirectories)");
  ingest->add_option("--demuxer", ingest_demuxer, "command template with {input} and {outdir}");
  ingest->add_option("--max-frames", ingest_max, "cap on I-frames per video (0 = all)");
  ingest->add_option("--jobs", ingest_jobs, "parallel videos")->capture_default_str();

  // landmarks-import
  auto* lm = app.add_subcommand("landmarks-import", "Convert per-frame 68-point text files to a sidecar");
  fs::path lm_input;
  fs::path lm_out;
  lm->add_option("--input", lm_input, "directory of per-frame text files")->required();
  lm->add_option("--out", lm_out, "sidecar JSON path")->required();

  // features
  auto* feat = app.add_subcommand("features", "Compute per-video beta descriptors per region");
  fs::path feat_manifest;
  fs::path feat_out;
  std::string feat_regions = "all";
  std::size_t feat_min_blocks = kDefaultMinBlocksPerPatch;
  bool feat_pooled = false;
  std::size_t feat_jobs = 1;
  feat->add_option("--manifest", feat_manifest)->required();
  feat->add_option("--out", feat_out, "output directory (tables go to <out>/features)")->required();
  feat->add_option("--regions", feat_regions, "comma list or 'all'")->capture_default_str();
  feat->add_option("--min-blocks", feat_min_blocks, "minimum blocks per patch")->capture_default_str();
  feat->add_flag("--pooled", feat_pooled, "estimate over all blocks of a video at once");
  feat->add_option("--jobs", feat_jobs)->capture_default_str();

  // split
  auto* split = app.add_subcommand("split", "Stratified 50/20/30 split over videos");
  fs::path split_features;
  std::uint64_t split_seed = 0;
  fs::path split_out;
  split->add_option("--features", split_features, "feature table directory")->required();
  split->add_option("--seed", split_seed)->required();
  split->add_option("--out", split_out, "split JSON path")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train one classifier on a region's training split");
  fs::path train_features;
  fs::path train_split;
  std::string train_classifier;
  std::uint64_t train_seed = 0;
  fs::path train_out;
  train_cmd->add_option("--features", train_features, "feature CSV of one region")->required();
  train_cmd->add_option("--split", train_split, "split JSON")->required();
  train_cmd->add_option("--classifier", train_classifier, "setting (knn_5, lda, ...) or family (knn)")->required();
  train_cmd->add_option("--seed", train_seed)->required();
  train_cmd->add_option("--out", train_out, "model JSON path")->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Region x classifier AUC grid on the test split");
  fs::path eval_features;
  std::uint64_t eval_seed = 0;
  fs::path eval_split;
  fs::path eval_out;
  std::string eval_regions = "all";
  std::string eval_classifiers = "knn,lda,decision_tree,random_forest";
  std::string eval_layout = "settings";
  std::string eval_formats = "csv,json,markdown";
  std::size_t eval_jobs = 1;
  eval->add_option("--features", eval_features, "feature table directory")->required();
  eval->add_option("--seed", eval_seed)->required();
  eval->add_option("--split", eval_split, "split JSON (computed from --seed if omitted)");
  eval->add_option("--out", eval_out, "report directory")->required();
  eval->add_option("--regions", eval_regions)->capture_default_str();
  eval->add_option("--classifiers", eval_classifiers, "families")->capture_default_str();
  eval->add_option("--layout", eval_layout, "settings | families")->capture_default_str();
  eval->add_option("--formats", eval_formats)->capture_default_str();
  eval->add_option("--jobs", eval_jobs)->capture_default_str();

  // run-all
  auto* run = app.add_subcommand("run-all", "ingest -> features -> evaluate from one config file");
  fs::path run_config;
  run->add_option("--config", run_config, "run configuration JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    spdlog::set_level(spdlog::level::from_str(log_level));

    if (*ingest) {
      if (ingest_videos_paths.empty() == ingest_frames_paths.empty()) {
        throw CLI::ValidationError("give exactly one of --videos or --frames");
      }
      IngestRequest request;
      request.policy = parse_ingest_policy(ingest_policy);
      request.options.demuxer_template = ingest_demuxer;
      request.options.jobs = ingest_jobs;
      if (ingest_max > 0) request.options.max_frames_per_video = ingest_max;
      std::optional<Label> label;
      if (!ingest_label.empty()) label = parse_label(ingest_label);
      for (const auto& p : ingest_videos_paths) {
        require_exists(p);
        request.inputs.push_back({InputKind::kVideos, p, label});
      }
      for (const auto& p : ingest_frames_paths) {
        require_exists(p);
        request.inputs.push_back({InputKind::kFrames, p, label});
      }
      const auto manifest = run_ingest(request, ingest_out);
      for (const auto& e : manifest.entries) {
        spdlog::info("{} ({}): {} I-frames", e.video_id, to_string(e.label), e.frames.size());
      }
      spdlog::info("manifest written to {}", (ingest_out / "manifest.json").string());
    } else if (*lm) {
      require_exists(lm_input);
      const auto landmarks = import_landmark_directory(lm_input);
      save_landmarks(landmarks, lm_out);
      spdlog::info("{} annotated frames written to {}", landmarks.size(), lm_out.string());
    } else if (*feat) {
      require_exists(feat_manifest);
      FeatureOptions options;
      options.regions = parse_regions(feat_regions);
      options.min_blocks_per_patch = feat_min_blocks;
      options.pooled = feat_pooled;
      options.jobs = feat_jobs;
      const auto result = run_features(feat_manifest, feat_out, options);
      for (const auto& path : result.written) spdlog::info("wrote {}", path.string());
    } else if (*split) {
      require_exists(split_features);
      const auto tables = load_feature_tables(split_features);
      if (tables.empty()) throw Error(ErrorCode::kIoError, "no feature tables in " + split_features.string());
      const auto assignment = split_from_tables(tables, split_seed);
      save_split(assignment, split_out);
      spdlog::info("split train/val/test = {}/{}/{}", assignment.train_ids.size(), assignment.val_ids.size(),
                   assignment.test_ids.size());
    } else if (*train_cmd) {
      require_exists(train_features);
      require_exists(train_split);
      const auto rows = read_feature_csv(train_features);
      if (rows.empty()) throw Error(ErrorCode::kNoPatches, "empty feature table");
      const auto dataset = make_dataset(rows.front().region, rows);
      const auto parts = apply_split(dataset, load_split(train_split));
      std::vector<ClassifierSpec> grid;
      try {
        grid = family_settings(train_classifier);
      } catch (const Error&) {
        grid = {parse_setting(train_classifier)};
      }
      const auto selection = select_model(grid, parts.train, parts.val, train_seed);
      save_model(*selection.model, train_out);
      spdlog::info("trained {} on {} rows", setting_key(grid[selection.chosen]), parts.train.size());
    } else if (*eval) {
      require_exists(eval_features);
      EvaluateRequest request;
      request.features_dir = eval_features;
      request.seed = eval_seed;
      if (!eval_split.empty()) {
        require_exists(eval_split);
        request.split_path = eval_split;
      }
      if (eval_regions != "all") request.regions = parse_regions(eval_regions);
      request.families = parse_families(eval_classifiers);
      request.layout = parse_layout(eval_layout);
      request.formats = parse_formats(eval_formats);
      request.jobs = eval_jobs;
      print_grid_summary(run_evaluate(request, eval_out));
    } else if (*run) {
      require_exists(run_config);
      const auto config = load_run_config(run_config);
      spdlog::set_level(spdlog::level::from_str(config.log_level));
      print_grid_summary(run_all(config));
    }
  } catch (const CLI::ValidationError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
  return 0;
}
