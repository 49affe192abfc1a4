#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "acbeta/manifest.hpp"
#include "support/synthetic.hpp"

namespace acbeta {
namespace {

namespace fs = std::filesystem;

struct Result {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const fs::path& work_dir() {
  static const fs::path dir = fs::temp_directory_path() / ("acbeta_cli_" + std::to_string(::getpid()));
  return dir;
}

Result run_cli(const std::string& args) {
  const fs::path stdout_file = work_dir() / "stdout.txt";
  const std::string command = std::string(ACBETA_CLI) + " --log-level warn " + args + " > " +
                              stdout_file.string() + " 2> " + (work_dir() / "stderr.txt").string();
  const int status = std::system(command.c_str());
  Result r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(stdout_file);
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::remove_all(work_dir());
    fs::create_directories(work_dir());
    synthetic::CorpusSpec spec;
    spec.videos_per_class = 12;
    spec.frames_per_video = 2;
    synthetic::write_corpus(work_dir() / "corpus", spec);
    ASSERT_EQ(run_cli("ingest --frames " + (work_dir() / "corpus").string() + " --policy all --out " +
                      (work_dir() / "run").string())
                  .exit_code,
              0);
    ASSERT_EQ(run_cli("features --manifest " + (work_dir() / "run/manifest.json").string() + " --out " +
                      (work_dir() / "run").string() + " --jobs 4")
                  .exit_code,
              0);
  }
  static void TearDownTestSuite() { fs::remove_all(work_dir()); }

  static fs::path features() { return work_dir() / "run/features"; }
};

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("ingest --frames /definitely/not/here --policy all --out " + (work_dir() / "x").string())
                .exit_code,
            2);
  EXPECT_EQ(run_cli("evaluate --features " + features().string()).exit_code, 2);
  EXPECT_EQ(run_cli("no-such-command").exit_code, 2);
}

TEST_F(CliTest, IngestWritesLabeledManifest) {
  const auto manifest = load_manifest(work_dir() / "run/manifest.json");
  ASSERT_EQ(manifest.entries.size(), 24u);
  std::size_t fake = 0;
  for (const auto& e : manifest.entries) {
    fake += e.label == Label::kFake;
    EXPECT_EQ(e.frames.size(), 2u);
    EXPECT_TRUE(e.landmark_sidecar.has_value());
  }
  EXPECT_EQ(fake, 12u);
}

TEST_F(CliTest, SevenRegionTables) {
  std::size_t tables = 0;
  for (const auto& f : fs::directory_iterator(features())) tables += f.path().extension() == ".csv";
  EXPECT_EQ(tables, 7u);
  const std::string face = slurp(features() / "face.csv");
  EXPECT_EQ(std::count(face.begin(), face.end(), '\n'), 25);
}

TEST_F(CliTest, WithoutLandmarksOnlyEntireFrame) {
  const fs::path corpus = work_dir() / "bare";
  fs::copy(work_dir() / "corpus", corpus, fs::copy_options::recursive);
  for (const auto& f : fs::recursive_directory_iterator(corpus)) {
    if (f.path().filename() == "landmarks.json") fs::remove(f.path());
  }
  const fs::path out = work_dir() / "bare_run";
  ASSERT_EQ(run_cli("ingest --frames " + corpus.string() + " --policy all --out " + out.string()).exit_code, 0);
  ASSERT_EQ(run_cli("features --manifest " + (out / "manifest.json").string() + " --out " + out.string()).exit_code, 0);
  std::vector<std::string> names;
  for (const auto& f : fs::directory_iterator(out / "features")) names.push_back(f.path().filename().string());
  EXPECT_EQ(names, std::vector<std::string>{"entire_frame.csv"});

  const auto r = run_cli("evaluate --features " + (out / "features").string() + " --seed 2 --classifiers lda --out " +
                         (out / "report").string());
  ASSERT_EQ(r.exit_code, 0);
  const std::string csv = slurp(out / "report/report.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
  EXPECT_NE(csv.find("lda,face,NA,"), std::string::npos);
}

TEST_F(CliTest, KnnFamilyGivesSixSettings) {
  const fs::path out = work_dir() / "knn_report";
  const auto r = run_cli("evaluate --features " + features().string() + " --seed 7 --classifiers knn --regions face --out " +
                         out.string());
  ASSERT_EQ(r.exit_code, 0);
  const std::string csv = slurp(out / "report.csv");
  for (const char* k : {"knn_3,", "knn_5,", "knn_7,", "knn_11,", "knn_13,", "knn_15,"}) {
    EXPECT_NE(csv.find(k), std::string::npos) << k;
  }
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST_F(CliTest, SameSeedSameReport) {
  const fs::path a = work_dir() / "rep_a";
  const fs::path b = work_dir() / "rep_b";
  const auto ra = run_cli("evaluate --features " + features().string() + " --seed 7 --out " + a.string() + " --jobs 4");
  const auto rb = run_cli("evaluate --features " + features().string() + " --seed 7 --out " + b.string());
  ASSERT_EQ(ra.exit_code, 0);
  ASSERT_EQ(rb.exit_code, 0);
  for (const char* f : {"report.csv", "report.json", "report.md", "heatmap.svg", "split.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_FALSE(slurp(a / f).empty()) << f;
  }
  EXPECT_EQ(ra.out, rb.out);
  EXPECT_EQ(ra.out.rfind("best: ", 0), 0u);
  const std::string csv = slurp(a / "report.csv");
  EXPECT_NE(csv.find("random_forest,"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 9 * 7);
}

TEST_F(CliTest, SplitThenTrain) {
  const fs::path split = work_dir() / "split.json";
  ASSERT_EQ(run_cli("split --features " + features().string() + " --seed 3 --out " + split.string()).exit_code, 0);
  const fs::path model = work_dir() / "model.json";
  ASSERT_EQ(run_cli("train --features " + (features() / "eyes.csv").string() + " --split " + split.string() +
                    " --classifier knn --seed 3 --out " + model.string())
                .exit_code,
            0);
  EXPECT_NE(slurp(model).find("\"kind\""), std::string::npos);
}

TEST_F(CliTest, RunAllFromConfig) {
  const fs::path config = work_dir() / "run.json";
  std::ofstream(config) << R"({"inputs": [{"frames": "corpus"}], "policy": "all", "regions": ["face", "eyes"],)"
                        << R"( "classifiers": ["lda", "random_forest"], "seed": 11, "output_dir": "all_out", "jobs": 4})";
  const auto r = run_cli("run-all --config " + config.string());
  ASSERT_EQ(r.exit_code, 0);
  const std::string csv = slurp(work_dir() / "all_out/report/report.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 2);
  EXPECT_NE(r.out.find("best: "), std::string::npos);
}

}  // namespace
}  // namespace acbeta
