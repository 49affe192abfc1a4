#include "acbeta/manifest.hpp"

#include <spdlog/spdlog.h>
#include <sys/wait.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include "acbeta/error.hpp"
#include "acbeta/image.hpp"
#include "acbeta/parallel.hpp"
#include "json.hpp"

namespace acbeta {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Label label) { return label == Label::kFake ? "fake" : "real"; }

Label parse_label(std::string_view text) {
  if (text == "real") return Label::kReal;
  if (text == "fake") return Label::kFake;
  throw Error(ErrorCode::kParseError, "label must be 'real' or 'fake', got '" + std::string(text) + "'");
}

IngestPolicy parse_ingest_policy(std::string_view text) {
  if (text == "iframes") return IngestPolicy::kIFrames;
  if (text == "all") return IngestPolicy::kAllFrames;
  throw Error(ErrorCode::kInvalidArgument, "policy must be 'iframes' or 'all'");
}

void validate(const VideoManifest& manifest) {
  std::set<std::string> seen;
  for (const auto& entry : manifest.entries) {
    if (entry.video_id.empty()) throw Error(ErrorCode::kSchemaMismatch, "empty video_id");
    if (!seen.insert(entry.video_id).second) {
      throw Error(ErrorCode::kSchemaMismatch, "duplicate video_id '" + entry.video_id + "'");
    }
    int previous = -1;
    for (const auto& frame : entry.frames) {
      if (frame.frame_index < 0 || frame.frame_index <= previous) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "frames of '" + entry.video_id + "' are not strictly increasing");
      }
      previous = frame.frame_index;
    }
  }
}

namespace {

json to_json(const VideoManifest& manifest) {
  json entries = json::array();
  for (const auto& entry : manifest.entries) {
    json frames = json::array();
    for (const auto& f : entry.frames) {
      frames.push_back({{"path", f.path.generic_string()},
                        {"frame_index", f.frame_index},
                        {"is_iframe", f.is_iframe}});
    }
    json e = {{"video_id", entry.video_id},
              {"label", std::string(to_string(entry.label))},
              {"frames", std::move(frames)}};
    e["landmark_sidecar"] =
        entry.landmark_sidecar ? json(entry.landmark_sidecar->generic_string()) : json(nullptr);
    entries.push_back(std::move(e));
  }
  return {{"schema_version", manifest.schema_version},
          {"corpus_root", manifest.corpus_root.generic_string()},
          {"entries", std::move(entries)}};
}

VideoManifest from_json(const json& doc) {
  VideoManifest manifest;
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw Error(ErrorCode::kParseError, "manifest is missing schema_version");
  }
  manifest.schema_version = doc.at("schema_version").get<int>();
  if (manifest.schema_version != kManifestSchemaVersion) {
    throw Error(ErrorCode::kSchemaMismatch,
                "unknown manifest schema_version " + std::to_string(manifest.schema_version));
  }
  manifest.corpus_root = doc.at("corpus_root").get<std::string>();
  for (const auto& e : doc.at("entries")) {
    VideoEntry entry;
    entry.video_id = e.at("video_id").get<std::string>();
    entry.label = parse_label(e.at("label").get<std::string>());
    for (const auto& f : e.at("frames")) {
      entry.frames.push_back({f.at("path").get<std::string>(), f.at("frame_index").get<int>(),
                              f.at("is_iframe").get<bool>()});
    }
    if (e.contains("landmark_sidecar") && !e.at("landmark_sidecar").is_null()) {
      entry.landmark_sidecar = fs::path(e.at("landmark_sidecar").get<std::string>());
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace

VideoManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open manifest " + path.string());
  VideoManifest manifest;
  try {
    manifest = from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  validate(manifest);
  return manifest;
}

void save_manifest(const VideoManifest& manifest, const fs::path& path) {
  validate(manifest);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << to_json(manifest).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

fs::path resolved_root(const VideoManifest& manifest, const fs::path& manifest_path) {
  if (manifest.corpus_root.is_absolute()) return manifest.corpus_root;
  return (manifest_path.parent_path() / manifest.corpus_root).lexically_normal();
}

std::optional<int> trailing_index(const fs::path& file) {
  const std::string stem = file.stem().string();
  std::size_t begin = stem.size();
  while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
  if (begin == stem.size() || stem.size() - begin > 9) return std::nullopt;
  return std::stoi(stem.substr(begin));
}

std::string shell_quote(std::string_view text) {
  std::string quoted = "'";
  for (const char c : text) {
    if (c == '\'') {
      quoted += "'\\''";
    } else {
      quoted += c;
    }
  }
  quoted += '\'';
  return quoted;
}

void merge_entries(VideoManifest& manifest, std::vector<VideoEntry> entries) {
  for (auto& entry : entries) {
    auto it = std::find_if(manifest.entries.begin(), manifest.entries.end(),
                           [&](const VideoEntry& e) { return e.video_id == entry.video_id; });
    if (it != manifest.entries.end()) {
      *it = std::move(entry);
    } else {
      manifest.entries.push_back(std::move(entry));
    }
  }
}

namespace {

std::vector<fs::path> sorted_images(const fs::path& dir) {
  std::vector<fs::path> images;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && is_supported_image(item.path())) images.push_back(item.path());
  }
  std::sort(images.begin(), images.end());
  return images;
}

fs::path relative_to(const fs::path& path, const fs::path& root) {
  return fs::weakly_canonical(path).lexically_relative(fs::weakly_canonical(root));
}

// Frame indices from file names; falls back to enumeration order when any
// name lacks digits or two files claim the same index.
std::vector<std::pair<int, fs::path>> index_dumped_frames(const std::vector<fs::path>& files) {
  std::vector<std::pair<int, fs::path>> indexed;
  std::set<int> used;
  bool usable = true;
  for (const auto& f : files) {
    const auto index = trailing_index(f);
    if (!index || !used.insert(*index).second) {
      usable = false;
      break;
    }
    indexed.emplace_back(*index, f);
  }
  if (!usable) {
    indexed.clear();
    for (std::size_t i = 0; i < files.size(); ++i) {
      indexed.emplace_back(static_cast<int>(i), files[i]);
    }
  }
  std::sort(indexed.begin(), indexed.end());
  return indexed;
}

std::string expand_template(std::string_view templ, const fs::path& input, const fs::path& outdir) {
  std::string command;
  for (std::size_t i = 0; i < templ.size();) {
    if (templ.substr(i, 7) == "{input}") {
      command += shell_quote(input.string());
      i += 7;
    } else if (templ.substr(i, 8) == "{outdir}") {
      command += shell_quote(outdir.string());
      i += 8;
    } else {
      command += templ[i++];
    }
  }
  return command;
}

std::vector<std::string> unique_ids(const std::vector<VideoSource>& videos) {
  std::vector<std::string> ids;
  std::map<std::string, int> counts;
  for (const auto& v : videos) {
    std::string id = v.path.stem().string();
    const int n = ++counts[id];
    if (n > 1) id += "_" + std::to_string(n);
    ids.push_back(id);
  }
  return ids;
}

}  // namespace

IngestReport ingest_videos(const std::vector<VideoSource>& videos, const fs::path& out_dir,
                           const IngestOptions& options) {
  fs::create_directories(out_dir);
  const auto ids = unique_ids(videos);
  std::vector<VideoEntry> entries(videos.size());
  std::vector<std::string> warnings(videos.size());

  parallel_for(videos.size(), options.jobs, [&](std::size_t i) {
    const auto& source = videos[i];
    const fs::path frame_dir = out_dir / "frames" / ids[i];
    fs::remove_all(frame_dir);
    fs::create_directories(frame_dir);

    const std::string command =
        "( " + expand_template(options.demuxer_template, source.path, frame_dir) + " ) 1>&2";
    const int status = std::system(command.c_str());
    if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
      throw Error(ErrorCode::kDemuxerFailed,
                  "demuxer failed on " + source.path.string() + " (status " +
                      std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : status) + ")");
    }

    VideoEntry entry{ids[i], source.label, {}, std::nullopt};
    auto indexed = index_dumped_frames(sorted_images(frame_dir));
    if (options.max_frames_per_video && indexed.size() > *options.max_frames_per_video) {
      indexed.resize(*options.max_frames_per_video);
    }
    for (const auto& [index, file] : indexed) {
      entry.frames.push_back({relative_to(file, out_dir), index, true});
    }
    if (entry.frames.empty()) {
      warnings[i] = "NoIFrames: " + source.path.string() + " yielded zero I-frames";
    }

    fs::path sidecar = source.path;
    sidecar.replace_extension(".landmarks.json");
    if (fs::exists(sidecar)) {
      fs::copy_file(sidecar, frame_dir / "landmarks.json", fs::copy_options::overwrite_existing);
      entry.landmark_sidecar = relative_to(frame_dir / "landmarks.json", out_dir);
    }
    entries[i] = std::move(entry);
  });

  IngestReport report;
  const fs::path manifest_path = out_dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    report.manifest = load_manifest(manifest_path);
    if (report.manifest.corpus_root != ".") {
      throw Error(ErrorCode::kSchemaMismatch,
                  manifest_path.string() + " has a foreign corpus_root; refusing to merge");
    }
  }
  report.manifest.corpus_root = ".";
  merge_entries(report.manifest, std::move(entries));
  for (auto& w : warnings) {
    if (!w.empty()) {
      spdlog::warn("{}", w);
      report.warnings.push_back(std::move(w));
    }
  }
  save_manifest(report.manifest, manifest_path);
  return report;
}

VideoEntry ingest_frame_directory(const fs::path& frames_dir, Label label, const fs::path& corpus_root,
                                  std::optional<std::size_t> max_frames) {
  if (!fs::is_directory(frames_dir)) {
    throw Error(ErrorCode::kIoError, "not a directory: " + frames_dir.string());
  }
  VideoEntry entry;
  entry.video_id = fs::weakly_canonical(frames_dir).filename().string();
  entry.label = label;
  auto images = sorted_images(frames_dir);
  if (max_frames && images.size() > *max_frames) images.resize(*max_frames);
  for (std::size_t i = 0; i < images.size(); ++i) {
    entry.frames.push_back({relative_to(images[i], corpus_root), static_cast<int>(i), true});
  }
  if (fs::exists(frames_dir / "landmarks.json")) {
    entry.landmark_sidecar = relative_to(frames_dir / "landmarks.json", corpus_root);
  }
  return entry;
}

}  // namespace acbeta
