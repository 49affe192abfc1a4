#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace acbeta {

enum class Label { kReal, kFake };

std::string_view to_string(Label label);
Label parse_label(std::string_view text);  // throws Error(kParseError)

struct FrameRef {
  std::filesystem::path path;  // relative to the manifest's corpus_root
  int frame_index = 0;
  bool is_iframe = true;

  friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

struct VideoEntry {
  std::string video_id;
  Label label = Label::kReal;
  std::vector<FrameRef> frames;
  std::optional<std::filesystem::path> landmark_sidecar;  // relative to corpus_root

  friend bool operator==(const VideoEntry&, const VideoEntry&) = default;
};

inline constexpr int kManifestSchemaVersion = 1;

struct VideoManifest {
  // As stored in the file. Relative roots are resolved against the
  // directory holding the manifest; see resolved_root().
  std::filesystem::path corpus_root = ".";
  std::vector<VideoEntry> entries;
  int schema_version = kManifestSchemaVersion;

  friend bool operator==(const VideoManifest&, const VideoManifest&) = default;
};

/// Checks the manifest invariants (unique ids, strictly increasing frame
/// indices, nonnegative indices). Throws Error(kSchemaMismatch).
void validate(const VideoManifest& manifest);

/// Throws Error(kParseError) on malformed JSON or missing fields and
/// Error(kSchemaMismatch) on an unknown schema_version or invariant violation.
VideoManifest load_manifest(const std::filesystem::path& path);

/// Validates, then writes pretty-printed JSON. Output depends only on the
/// manifest contents.
void save_manifest(const VideoManifest& manifest, const std::filesystem::path& path);

std::filesystem::path resolved_root(const VideoManifest& manifest,
                                    const std::filesystem::path& manifest_path);

// ---- ingestion ----------------------------------------------------------

enum class IngestPolicy {
  kIFrames,    // run the external demuxer and keep only I-frames
  kAllFrames,  // every image in a frame directory counts as an I-frame
};

IngestPolicy parse_ingest_policy(std::string_view text);

/// Default demuxer template. {input} and {outdir} are replaced with
/// shell-quoted paths. The demuxer must leave one lossless image per I-frame
/// in {outdir}; the trailing digits of each file name give the frame index.
inline constexpr std::string_view kDefaultDemuxerTemplate =
    "ffmpeg -nostdin -v error -i {input} "
    "-vf \"setpts=N,select='eq(pict_type,I)'\" -fps_mode passthrough "
    "-enc_time_base -1 -frame_pts 1 {outdir}/%06d.png";

struct VideoSource {
  std::filesystem::path path;
  Label label = Label::kReal;
};

struct IngestOptions {
  std::string demuxer_template{kDefaultDemuxerTemplate};
  std::optional<std::size_t> max_frames_per_video;
  std::size_t jobs = 1;
};

struct IngestReport {
  VideoManifest manifest;
  std::vector<std::string> warnings;
};

/// Dumps the I-frames of every video into out_dir/frames/<video_id>/ via the
/// demuxer and merges the entries into out_dir/manifest.json (created with
/// corpus_root = "." if absent); the merged manifest is returned. A `<stem>.landmarks.json` next to a
/// video is copied alongside its frames and referenced as its sidecar.
/// Videos that yield no frames keep an empty frame list and add a warning.
/// Throws Error(kDemuxerFailed) when the demuxer exits nonzero.
IngestReport ingest_videos(const std::vector<VideoSource>& videos,
                           const std::filesystem::path& out_dir, const IngestOptions& options);

/// Treats every supported image in `frames_dir` as an I-frame of one video
/// named after the directory; files are sorted by name and indexed 0..n-1.
/// A landmarks.json in the directory becomes the sidecar. Paths are stored
/// relative to `corpus_root`.
VideoEntry ingest_frame_directory(const std::filesystem::path& frames_dir, Label label,
                                  const std::filesystem::path& corpus_root,
                                  std::optional<std::size_t> max_frames = std::nullopt);

/// Replaces entries with matching video_id in place and appends the rest, so
/// repeated ingestion of the same inputs is idempotent.
void merge_entries(VideoManifest& manifest, std::vector<VideoEntry> entries);

// Frame index encoded as the trailing digits of a file stem, if any.
std::optional<int> trailing_index(const std::filesystem::path& file);

std::string shell_quote(std::string_view text);

}  // namespace acbeta
