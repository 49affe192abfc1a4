#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "acbeta/error.hpp"
#include "acbeta/image.hpp"
#include "acbeta/manifest.hpp"

namespace acbeta {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag)
      : path_(fs::temp_directory_path() / ("acbeta_manifest_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// Stand-in for a real demuxer: the "video" is a text file of I-frame numbers
// and each one becomes an 8x8 PGM named after it. A line "fail" exits 3.
std::string fake_demuxer(const fs::path& dir) {
  const fs::path script = dir / "fake_demux.sh";
  std::ofstream(script) << "#!/bin/sh\n"
                           "set -e\n"
                           "for n in $(cat \"$1\"); do\n"
                           "  if [ \"$n\" = fail ]; then exit 3; fi\n"
                           "  f=\"$2/$(printf %06d \"$n\").pgm\"\n"
                           "  printf 'P5\\n8 8\\n255\\n' > \"$f\"\n"
                           "  head -c 64 /dev/zero >> \"$f\"\n"
                           "done\n";
  return "sh " + shell_quote(script.string()) + " {input} {outdir}";
}

VideoManifest sample_manifest() {
  VideoManifest m;
  m.corpus_root = "corpus";
  m.entries.push_back({"zeta", Label::kFake, {{"zeta/0.png", 0, true}, {"zeta/12.png", 12, true}}, std::nullopt});
  m.entries.push_back({"alpha", Label::kReal, {{"alpha/3.png", 3, true}}, fs::path("alpha/landmarks.json")});
  return m;
}

TEST(ManifestTest, RoundTripPreservesOrder) {
  TempDir dir("roundtrip");
  const auto m = sample_manifest();
  save_manifest(m, dir.path() / "m.json");
  const auto loaded = load_manifest(dir.path() / "m.json");
  EXPECT_EQ(loaded, m);
  EXPECT_EQ(loaded.entries.front().video_id, "zeta");
  save_manifest(loaded, dir.path() / "m2.json");
  EXPECT_EQ(slurp(dir.path() / "m.json"), slurp(dir.path() / "m2.json"));
}

TEST(ManifestTest, RejectsBrokenInputs) {
  TempDir dir("broken");
  auto dup = sample_manifest();
  dup.entries[1].video_id = "zeta";
  EXPECT_EQ(code_of([&] { validate(dup); }), ErrorCode::kSchemaMismatch);

  auto unordered = sample_manifest();
  std::swap(unordered.entries[0].frames[0], unordered.entries[0].frames[1]);
  EXPECT_EQ(code_of([&] { validate(unordered); }), ErrorCode::kSchemaMismatch);

  std::ofstream(dir.path() / "bad.json") << "{ not json";
  EXPECT_EQ(code_of([&] { load_manifest(dir.path() / "bad.json"); }), ErrorCode::kParseError);

  std::ofstream(dir.path() / "v9.json") << R"({"schema_version": 9, "corpus_root": ".", "entries": []})";
  EXPECT_EQ(code_of([&] { load_manifest(dir.path() / "v9.json"); }), ErrorCode::kSchemaMismatch);

  std::ofstream(dir.path() / "label.json")
      << R"({"schema_version": 1, "corpus_root": ".", "entries": [{"video_id": "a", "label": "maybe", "frames": []}]})";
  EXPECT_EQ(code_of([&] { load_manifest(dir.path() / "label.json"); }), ErrorCode::kParseError);
}

TEST(ManifestTest, MergeReplacesById) {
  auto m = sample_manifest();
  VideoEntry replacement{"alpha", Label::kFake, {}, std::nullopt};
  VideoEntry fresh{"beta", Label::kReal, {}, std::nullopt};
  merge_entries(m, {replacement, fresh});
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.entries[1], replacement);
  EXPECT_EQ(m.entries[2].video_id, "beta");
  merge_entries(m, {replacement, fresh});
  EXPECT_EQ(m.entries.size(), 3u);
}

TEST(TrailingIndexTest, ParsesDigits) {
  EXPECT_EQ(trailing_index("frame_000042.png"), 42);
  EXPECT_EQ(trailing_index("7.pgm"), 7);
  EXPECT_EQ(trailing_index("cover.png"), std::nullopt);
}

TEST(FrameDirectoryTest, IndicesFollowSortedNames) {
  TempDir dir("frames");
  const fs::path video = dir.path() / "clip_a";
  fs::create_directories(video);
  for (const char* name : {"b.pgm", "a.pgm", "c.pgm"}) write_pgm(GrayImage(8, 8, 1), video / name);
  std::ofstream(video / "notes.txt") << "ignored";
  std::ofstream(video / "landmarks.json") << "{}";

  const auto entry = ingest_frame_directory(video, Label::kFake, dir.path());
  EXPECT_EQ(entry.video_id, "clip_a");
  EXPECT_EQ(entry.label, Label::kFake);
  ASSERT_EQ(entry.frames.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(entry.frames[i].frame_index, i);
    EXPECT_TRUE(entry.frames[i].is_iframe);
  }
  EXPECT_EQ(entry.frames[0].path, fs::path("clip_a/a.pgm"));
  EXPECT_EQ(entry.landmark_sidecar, fs::path("clip_a/landmarks.json"));
  EXPECT_EQ(ingest_frame_directory(video, Label::kFake, dir.path(), 2).frames.size(), 2u);
  EXPECT_EQ(code_of([&] { ingest_frame_directory(dir.path() / "nope", Label::kReal, dir.path()); }),
            ErrorCode::kIoError);
}

TEST(IngestVideosTest, FakeDemuxerFramesBecomeEntries) {
  TempDir dir("videos");
  std::ofstream(dir.path() / "one.vid") << "0\n12\n30\n";
  std::ofstream(dir.path() / "two.vid") << "5\n";
  std::ofstream(dir.path() / "one.landmarks.json") << "{}";
  IngestOptions options;
  options.demuxer_template = fake_demuxer(dir.path());
  options.jobs = 2;
  const fs::path out = dir.path() / "out";

  const auto report = ingest_videos({{dir.path() / "one.vid", Label::kReal}, {dir.path() / "two.vid", Label::kFake}},
                                    out, options);
  ASSERT_EQ(report.manifest.entries.size(), 2u);
  const auto& one = report.manifest.entries[0];
  EXPECT_EQ(one.video_id, "one");
  ASSERT_EQ(one.frames.size(), 3u);
  EXPECT_EQ(one.frames[1].frame_index, 12);
  EXPECT_EQ(one.frames[2].frame_index, 30);
  EXPECT_TRUE(fs::exists(out / one.frames[2].path));
  EXPECT_EQ(one.landmark_sidecar, fs::path("frames/one/landmarks.json"));
  EXPECT_EQ(report.manifest.entries[1].label, Label::kFake);
  EXPECT_TRUE(report.warnings.empty());
  EXPECT_EQ(load_manifest(out / "manifest.json"), report.manifest);

  const std::string first = slurp(out / "manifest.json");
  ingest_videos({{dir.path() / "one.vid", Label::kReal}, {dir.path() / "two.vid", Label::kFake}}, out, options);
  EXPECT_EQ(slurp(out / "manifest.json"), first);

  options.max_frames_per_video = 2;
  const auto capped = ingest_videos({{dir.path() / "one.vid", Label::kReal}}, out, options);
  EXPECT_EQ(capped.manifest.entries[0].frames.size(), 2u);
}

TEST(IngestVideosTest, EmptyAndFailingVideos) {
  TempDir dir("fail");
  std::ofstream(dir.path() / "empty.vid") << "";
  std::ofstream(dir.path() / "bad.vid") << "1\nfail\n";
  IngestOptions options;
  options.demuxer_template = fake_demuxer(dir.path());

  const auto report = ingest_videos({{dir.path() / "empty.vid", Label::kReal}}, dir.path() / "out", options);
  ASSERT_EQ(report.manifest.entries.size(), 1u);
  EXPECT_TRUE(report.manifest.entries[0].frames.empty());
  ASSERT_EQ(report.warnings.size(), 1u);
  EXPECT_NE(report.warnings[0].find("NoIFrames"), std::string::npos);

  EXPECT_EQ(code_of([&] { ingest_videos({{dir.path() / "bad.vid", Label::kReal}}, dir.path() / "out2", options); }),
            ErrorCode::kDemuxerFailed);

  const auto none = ingest_videos({}, dir.path() / "out3", options);
  EXPECT_TRUE(none.manifest.entries.empty());
  EXPECT_TRUE(fs::exists(dir.path() / "out3" / "manifest.json"));
}

}  // namespace
}  // namespace acbeta
