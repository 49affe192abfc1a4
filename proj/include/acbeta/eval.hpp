#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "acbeta/classifiers.hpp"
#include "acbeta/metrics.hpp"
#include "acbeta/regions.hpp"
#include "json.hpp"

namespace acbeta {

struct EvalCell {
  std::string classifier;  // setting key ("knn_7") or family key ("knn")
  RegionKind region = RegionKind::kEntireFrame;
  std::optional<double> auc;  // nullopt marks an absent cell, never 0
  std::size_t n_test = 0;
  std::string selected;  // setting chosen on validation
  std::string note;      // why a cell is absent

  friend bool operator==(const EvalCell&, const EvalCell&) = default;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
  friend bool operator==(const SplitSizes&, const SplitSizes&) = default;
};

struct EvalGrid {
  std::vector<EvalCell> cells;  // classifier-major, regions in request order
  std::uint64_t seed = 0;
  SplitSizes split_sizes;

  friend bool operator==(const EvalGrid&, const EvalGrid&) = default;
};

// One row of the grid: a name and the settings selection chooses among.
struct GridRow {
  std::string name;
  std::vector<ClassifierSpec> settings;
};

enum class GridLayout {
  kSettings,  // one row per hyperparameter setting (knn_3 ... knn_15, lda, ...)
  kFamilies,  // one row per family; k is selected on the validation split
};

GridLayout parse_layout(std::string_view text);

/// Expands family names ("knn", "lda", "decision_tree", "random_forest") to
/// grid rows under the given layout.
std::vector<GridRow> make_grid_rows(std::span<const std::string> families, GridLayout layout);

/// For every (row, region): select on train/val, score the test split once,
/// record the test AUC. Regions without a dataset, and cells whose training
/// or test rows lack a class, are recorded as absent. Deterministic in
/// `seed`; cells may run on `jobs` threads.
EvalGrid evaluate_grid(const std::map<RegionKind, Dataset>& datasets, std::span<const RegionKind> regions,
                       std::span<const GridRow> rows, const SplitAssignment& split, std::uint64_t seed,
                       std::size_t jobs = 1);

/// Best present cell; first in grid order on ties.
std::optional<EvalCell> best_cell(const EvalGrid& grid);

enum class ReportFormat { kCsv, kJson, kMarkdown };
ReportFormat parse_report_format(std::string_view text);

nlohmann::json grid_to_json(const EvalGrid& grid);
EvalGrid grid_from_json(const nlohmann::json& doc);

/// CSV: classifier,region,auc_percent,n_test with two-decimal percentages
/// ("NA" for absent cells). JSON mirrors EvalGrid. Markdown is a
/// classifier x region table. Throws Error(kIoError).
void emit_report(const EvalGrid& grid, ReportFormat format, const std::filesystem::path& out);

/// Standalone SVG heatmap, classifiers as rows and regions as columns; fill
/// runs linearly over 50-100 % AUC and absent cells are hatched gray.
void emit_heatmap(const EvalGrid& grid, const std::filesystem::path& out);

std::string format_percent(double auc);

}  // namespace acbeta
