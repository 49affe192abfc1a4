#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <unistd.h>

#include "acbeta/error.hpp"
#include "acbeta/eval.hpp"
#include "acbeta/metrics.hpp"
#include "acbeta/random.hpp"
#include "support/oracles.hpp"

namespace acbeta {
namespace {

namespace fs = std::filesystem;

std::vector<ScoredPrediction> predictions(const std::vector<std::pair<double, bool>>& scored) {
  std::vector<ScoredPrediction> out;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    out.push_back({std::to_string(i), scored[i].first, scored[i].second ? Label::kFake : Label::kReal});
  }
  return out;
}

std::vector<std::pair<double, bool>> random_scored(Rng& rng, std::size_t n, std::uint64_t levels) {
  std::vector<std::pair<double, bool>> scored(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool fake = i < 2 ? i == 1 : rng.uniform_index(2) == 1;
    const double s = levels == 0 ? rng.uniform01() : static_cast<double>(rng.uniform_index(levels)) / levels;
    scored[i] = {s, fake};
  }
  return scored;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("acbeta_eval_" + std::to_string(::getpid()) + "_" + name);
}

// ---- AUC ----

TEST(AucTest, Extremes) {
  EXPECT_EQ(auc(predictions({{0.1, false}, {0.2, false}, {0.8, true}, {0.9, true}})), 1.0);
  EXPECT_EQ(auc(predictions({{0.9, false}, {0.8, true}})), 0.0);
  EXPECT_EQ(auc(predictions({{0.5, false}, {0.5, true}, {0.5, true}, {0.5, false}, {0.5, false}})), 0.5);
}

TEST(AucTest, MatchesPairCountingOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const auto scored = random_scored(rng, 30, trial % 3 == 0 ? 4 : 0);
    EXPECT_NEAR(auc(predictions(scored)), oracle::auc_pairs(scored), 1e-12) << trial;
  }
}

TEST(AucTest, NegationAndMonotoneTransforms) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto scored = random_scored(rng, 50, trial % 2 ? 5 : 0);
    const double base = auc(predictions(scored));
    auto negated = scored;
    auto warped = scored;
    for (auto& p : negated) p.first = 1.0 - p.first;
    for (auto& p : warped) p.first = std::exp(3.0 * p.first);
    EXPECT_NEAR(auc(predictions(negated)), 1.0 - base, 1e-12);
    EXPECT_EQ(auc(predictions(warped)), base);
  }
}

TEST(AucTest, Errors) {
  EXPECT_THROW(auc(predictions({{0.1, true}, {0.2, true}})), Error);
  try {
    auc(predictions({{0.1, false}}));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingleClassTest);
  }
  EXPECT_THROW(auc(predictions({{NAN, true}, {0.2, false}})), Error);
}

// ---- grid ----

// Real rows near 1.0 and fake rows near 3.0 in every coordinate.
std::map<RegionKind, Dataset> separable_tables(std::size_t per_class, std::uint64_t seed) {
  std::map<RegionKind, Dataset> out;
  Rng rng(seed);
  for (const RegionKind region : kAllRegions) {
    Dataset d;
    d.region = region;
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
      const bool fake = i >= per_class;
      Sample s;
      s.label = fake ? Label::kFake : Label::kReal;
      s.video_id = (fake ? "fake_" : "real_") + std::to_string(i % per_class);
      for (int c = 0; c < 63; ++c) s.features.push_back((fake ? 3.0 : 1.0) + 0.3 * (rng.uniform01() - 0.5));
      d.rows.push_back(std::move(s));
    }
    out.emplace(region, std::move(d));
  }
  return out;
}

const std::vector<std::string> kFamilies = {"knn", "lda", "decision_tree", "random_forest"};

TEST(GridTest, RowLayouts) {
  const auto settings = make_grid_rows(kFamilies, GridLayout::kSettings);
  ASSERT_EQ(settings.size(), 9u);
  EXPECT_EQ(settings[0].name, "knn_3");
  EXPECT_EQ(settings[5].name, "knn_15");
  EXPECT_EQ(settings[8].name, "random_forest");
  const auto families = make_grid_rows(kFamilies, GridLayout::kFamilies);
  ASSERT_EQ(families.size(), 4u);
  EXPECT_EQ(families[0].settings.size(), 6u);
  EXPECT_EQ(parse_layout("families"), GridLayout::kFamilies);
}

TEST(GridTest, OneClassifierSevenRegions) {
  const auto tables = separable_tables(12, 1);
  const auto split = stratified_split(tables.begin()->second, 4);
  const auto rows = make_grid_rows(std::vector<std::string>{"lda"}, GridLayout::kSettings);
  const auto grid = evaluate_grid(tables, kAllRegions, rows, split, 4);
  ASSERT_EQ(grid.cells.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_EQ(grid.cells[i].region, kAllRegions[i]);
    EXPECT_EQ(grid.cells[i].classifier, "lda");
  }
  EXPECT_EQ(grid.split_sizes.train, 12u);
  EXPECT_EQ(grid.split_sizes.val, 4u);
  EXPECT_EQ(grid.split_sizes.test, 8u);
}

TEST(GridTest, SeparableCorpusScoresHighEverywhere) {
  const auto tables = separable_tables(40, 2);
  const auto split = stratified_split(tables.begin()->second, 9);
  for (const auto layout : {GridLayout::kSettings, GridLayout::kFamilies}) {
    const auto rows = make_grid_rows(kFamilies, layout);
    const auto grid = evaluate_grid(tables, kAllRegions, rows, split, 9, 4);
    ASSERT_EQ(grid.cells.size(), rows.size() * 7);
    for (const auto& cell : grid.cells) {
      ASSERT_TRUE(cell.auc.has_value()) << cell.classifier;
      EXPECT_GE(*cell.auc, 0.95) << cell.classifier << " " << to_string(cell.region);
      EXPECT_EQ(cell.n_test, 24u);
    }
  }
}

TEST(GridTest, DeterministicAcrossThreadCounts) {
  auto tables = separable_tables(15, 3);
  // Overlapping classes so scores are not all perfect.
  for (auto& [region, d] : tables)
    for (auto& s : d.rows) s.features[0] += s.label == Label::kFake ? -1.5 : 1.5;
  const auto split = stratified_split(tables.begin()->second, 5);
  const auto rows = make_grid_rows(kFamilies, GridLayout::kSettings);
  const auto a = evaluate_grid(tables, kAllRegions, rows, split, 5, 1);
  const auto b = evaluate_grid(tables, kAllRegions, rows, split, 5, 8);
  EXPECT_EQ(a, b);
}

TEST(GridTest, MissingRegionIsAbsentNotZero) {
  auto tables = separable_tables(10, 4);
  tables.erase(RegionKind::kMouth);
  const auto split = stratified_split(tables.begin()->second, 1);
  const auto rows = make_grid_rows(std::vector<std::string>{"decision_tree"}, GridLayout::kSettings);
  const auto grid = evaluate_grid(tables, kAllRegions, rows, split, 1);
  ASSERT_EQ(grid.cells.size(), 7u);
  const auto& mouth = grid.cells[static_cast<std::size_t>(RegionKind::kMouth)];
  EXPECT_FALSE(mouth.auc.has_value());
  EXPECT_FALSE(mouth.note.empty());
  EXPECT_EQ(best_cell(grid)->region, RegionKind::kEntireFrame);
}

// ---- reports ----

EvalGrid handmade_grid() {
  EvalGrid grid;
  grid.seed = 3;
  grid.split_sizes = {10, 4, 6};
  grid.cells.push_back({"knn_3", RegionKind::kEyes, 0.9455, 6, "knn_3", ""});
  grid.cells.push_back({"knn_3", RegionKind::kNose, 0.9428, 6, "knn_3", ""});
  grid.cells.push_back({"lda", RegionKind::kEyes, 0.5, 6, "lda", ""});
  grid.cells.push_back({"lda", RegionKind::kNose, std::nullopt, 0, "", "no dataset"});
  return grid;
}

TEST(ReportTest, CsvRows) {
  const auto path = temp_path("r.csv");
  emit_report(handmade_grid(), ReportFormat::kCsv, path);
  const std::string text = slurp(path);
  EXPECT_EQ(text,
            "classifier,region,auc_percent,n_test\n"
            "knn_3,eyes,94.55,6\n"
            "knn_3,nose,94.28,6\n"
            "lda,eyes,50.00,6\n"
            "lda,nose,NA,0\n");
  EvalGrid empty;
  emit_report(empty, ReportFormat::kCsv, path);
  EXPECT_EQ(slurp(path), "classifier,region,auc_percent,n_test\n");
  fs::remove(path);
}

TEST(ReportTest, CsvRowCountForFullGrid) {
  EvalGrid grid;
  for (int c = 0; c < 13; ++c)
    for (const auto r : kAllRegions) grid.cells.push_back({"c" + std::to_string(c), r, 0.75, 5, "", ""});
  const auto path = temp_path("full.csv");
  emit_report(grid, ReportFormat::kCsv, path);
  const std::string text = slurp(path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 92);
  fs::remove(path);
}

TEST(ReportTest, JsonRoundTripAndMarkdown) {
  const auto grid = handmade_grid();
  EXPECT_EQ(grid_from_json(grid_to_json(grid)), grid);
  const auto path = temp_path("r.json");
  emit_report(grid, ReportFormat::kJson, path);
  EXPECT_EQ(grid_from_json(nlohmann::json::parse(slurp(path))), grid);
  const auto md = temp_path("r.md");
  emit_report(grid, ReportFormat::kMarkdown, md);
  const std::string table = slurp(md);
  EXPECT_NE(table.find("94.55"), std::string::npos);
  EXPECT_NE(table.find("n/a"), std::string::npos);
  fs::remove(path);
  fs::remove(md);
}

TEST(ReportTest, HeatmapCells) {
  const auto path = temp_path("h.svg");
  emit_heatmap(handmade_grid(), path);
  const std::string svg = slurp(path);
  const std::regex cell_re("<rect class=\"cell\"");
  EXPECT_EQ(std::distance(std::sregex_iterator(svg.begin(), svg.end(), cell_re), std::sregex_iterator()), 4);
  EXPECT_NE(svg.find(">94.55<"), std::string::npos);
  EXPECT_NE(svg.find("fill=\"url(#absent)\""), std::string::npos);
  EXPECT_NE(svg.find(">n/a<"), std::string::npos);
  EXPECT_NE(svg.find("fill=\"#ffffcc\""), std::string::npos);  // 50 % end of the scale
  fs::remove(path);
}

TEST(ReportTest, PercentFormatting) {
  EXPECT_EQ(format_percent(0.9455), "94.55");
  EXPECT_EQ(format_percent(1.0), "100.00");
  EXPECT_EQ(format_percent(0.0), "0.00");
}

}  // namespace
}  // namespace acbeta
