#include "acbeta/eval.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "acbeta/error.hpp"
#include "acbeta/parallel.hpp"

namespace acbeta {

namespace fs = std::filesystem;
using nlohmann::json;

GridLayout parse_layout(std::string_view text) {
  if (text == "settings") return GridLayout::kSettings;
  if (text == "families") return GridLayout::kFamilies;
  throw Error(ErrorCode::kParseError, "layout must be 'settings' or 'families'");
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::kCsv;
  if (text == "json") return ReportFormat::kJson;
  if (text == "markdown" || text == "md") return ReportFormat::kMarkdown;
  throw Error(ErrorCode::kParseError, "unknown report format '" + std::string(text) + "'");
}

std::vector<GridRow> make_grid_rows(std::span<const std::string> families, GridLayout layout) {
  std::vector<GridRow> rows;
  for (const auto& family : families) {
    auto settings = family_settings(family);
    if (layout == GridLayout::kFamilies) {
      rows.push_back({family, std::move(settings)});
    } else {
      for (auto& s : settings) rows.push_back({setting_key(s), {s}});
    }
  }
  return rows;
}

namespace {

bool has_both_classes(std::span<const Sample> rows) {
  bool real = false;
  bool fake = false;
  for (const auto& r : rows) (r.label == Label::kFake ? fake : real) = true;
  return real && fake;
}

EvalCell evaluate_cell(const GridRow& row, RegionKind region, const Dataset* dataset,
                       const SplitAssignment& split, std::uint64_t seed) {
  EvalCell cell{row.name, region, std::nullopt, 0, {}, {}};
  if (dataset == nullptr || dataset->rows.empty()) {
    cell.note = "no descriptors";
    return cell;
  }
  const DatasetSplit parts = apply_split(*dataset, split);
  cell.n_test = parts.test.size();
  if (!has_both_classes(parts.train)) {
    cell.note = "training split has one class";
    return cell;
  }
  if (!has_both_classes(parts.test)) {
    cell.note = "test split has one class";
    return cell;
  }
  if (row.settings.size() > 1 && !has_both_classes(parts.val)) {
    cell.note = "validation split has one class";
    return cell;
  }
  // Selection sees train and validation rows only; test rows are scored once.
  const Selection selection = select_model(row.settings, parts.train, parts.val, seed);
  cell.selected = setting_key(row.settings[selection.chosen]);
  const auto predictions = score_rows(*selection.model, parts.test);
  cell.auc = auc(predictions);
  return cell;
}

}  // namespace

EvalGrid evaluate_grid(const std::map<RegionKind, Dataset>& datasets, std::span<const RegionKind> regions,
                       std::span<const GridRow> rows, const SplitAssignment& split, std::uint64_t seed,
                       std::size_t jobs) {
  EvalGrid grid;
  grid.seed = seed;
  grid.split_sizes = {split.train_ids.size(), split.val_ids.size(), split.test_ids.size()};
  grid.cells.resize(rows.size() * regions.size());
  parallel_for(grid.cells.size(), jobs, [&](std::size_t i) {
    const auto& row = rows[i / regions.size()];
    const RegionKind region = regions[i % regions.size()];
    const auto it = datasets.find(region);
    grid.cells[i] = evaluate_cell(row, region, it == datasets.end() ? nullptr : &it->second, split, seed);
  });
  for (const auto& cell : grid.cells) {
    if (!cell.auc) spdlog::warn("cell {} x {} absent: {}", cell.classifier, to_string(cell.region), cell.note);
  }
  return grid;
}

std::optional<EvalCell> best_cell(const EvalGrid& grid) {
  std::optional<EvalCell> best;
  for (const auto& cell : grid.cells) {
    if (cell.auc && (!best || *cell.auc > *best->auc)) best = cell;
  }
  return best;
}

std::string format_percent(double auc) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", auc * 100.0);
  return buf;
}

// ---- JSON ---------------------------------------------------------------

json grid_to_json(const EvalGrid& grid) {
  json cells = json::array();
  for (const auto& c : grid.cells) {
    cells.push_back({{"classifier", c.classifier},
                     {"region", std::string(to_string(c.region))},
                     {"auc", c.auc ? json(*c.auc) : json(nullptr)},
                     {"n_test", c.n_test},
                     {"selected", c.selected},
                     {"note", c.note}});
  }
  return {{"seed", grid.seed},
          {"split_sizes",
           {{"train", grid.split_sizes.train}, {"val", grid.split_sizes.val}, {"test", grid.split_sizes.test}}},
          {"cells", std::move(cells)}};
}

EvalGrid grid_from_json(const json& doc) {
  EvalGrid grid;
  try {
    grid.seed = doc.at("seed").get<std::uint64_t>();
    const auto& sizes = doc.at("split_sizes");
    grid.split_sizes = {sizes.at("train").get<std::size_t>(), sizes.at("val").get<std::size_t>(),
                        sizes.at("test").get<std::size_t>()};
    for (const auto& c : doc.at("cells")) {
      EvalCell cell;
      cell.classifier = c.at("classifier").get<std::string>();
      cell.region = parse_region(c.at("region").get<std::string>());
      if (!c.at("auc").is_null()) cell.auc = c.at("auc").get<double>();
      cell.n_test = c.at("n_test").get<std::size_t>();
      cell.selected = c.value("selected", "");
      cell.note = c.value("note", "");
      grid.cells.push_back(std::move(cell));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("grid: ") + e.what());
  }
  return grid;
}

// ---- reports ------------------------------------------------------------

namespace {

std::ofstream open_output(const fs::path& out) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream file(out, std::ios::binary);
  if (!file) throw Error(ErrorCode::kIoError, "cannot write " + out.string());
  return file;
}

// Row and column labels in first-appearance order.
struct Axes {
  std::vector<std::string> classifiers;
  std::vector<RegionKind> regions;
};

Axes grid_axes(const EvalGrid& grid) {
  Axes axes;
  for (const auto& c : grid.cells) {
    if (std::find(axes.classifiers.begin(), axes.classifiers.end(), c.classifier) == axes.classifiers.end()) {
      axes.classifiers.push_back(c.classifier);
    }
    if (std::find(axes.regions.begin(), axes.regions.end(), c.region) == axes.regions.end()) {
      axes.regions.push_back(c.region);
    }
  }
  return axes;
}

const EvalCell* find_cell(const EvalGrid& grid, const std::string& classifier, RegionKind region) {
  for (const auto& c : grid.cells) {
    if (c.classifier == classifier && c.region == region) return &c;
  }
  return nullptr;
}

void write_csv(const EvalGrid& grid, std::ostream& out) {
  out << "classifier,region,auc_percent,n_test\n";
  for (const auto& c : grid.cells) {
    out << c.classifier << ',' << to_string(c.region) << ',' << (c.auc ? format_percent(*c.auc) : "NA") << ','
        << c.n_test << '\n';
  }
}

void write_markdown(const EvalGrid& grid, std::ostream& out) {
  const Axes axes = grid_axes(grid);
  out << "| classifier |";
  for (const auto r : axes.regions) out << ' ' << to_string(r) << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < axes.regions.size(); ++i) out << "---:|";
  out << '\n';
  for (const auto& name : axes.classifiers) {
    out << "| " << name << " |";
    for (const auto r : axes.regions) {
      const EvalCell* cell = find_cell(grid, name, r);
      out << ' ' << (cell && cell->auc ? format_percent(*cell->auc) : std::string("n/a")) << " |";
    }
    out << '\n';
  }
  out << "\nAUC (%) on the test split; seed " << grid.seed << ", videos train/val/test = "
      << grid.split_sizes.train << '/' << grid.split_sizes.val << '/' << grid.split_sizes.test << ".\n";
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void emit_report(const EvalGrid& grid, ReportFormat format, const fs::path& out) {
  auto file = open_output(out);
  switch (format) {
    case ReportFormat::kCsv: write_csv(grid, file); break;
    case ReportFormat::kJson: file << grid_to_json(grid).dump(2) << '\n'; break;
    case ReportFormat::kMarkdown: write_markdown(grid, file); break;
  }
  if (!file) throw Error(ErrorCode::kIoError, "short write to " + out.string());
}

void emit_heatmap(const EvalGrid& grid, const fs::path& out) {
  if (grid.cells.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot draw an empty grid");
  const Axes axes = grid_axes(grid);
  constexpr int kCellW = 96;
  constexpr int kCellH = 34;
  constexpr int kLeft = 150;
  constexpr int kTop = 40;
  const int width = kLeft + kCellW * static_cast<int>(axes.regions.size()) + 10;
  const int height = kTop + kCellH * static_cast<int>(axes.classifiers.size()) + 30;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<defs><pattern id=\"absent\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"#d9d9d9\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#969696\" stroke-width=\"2\"/></pattern></defs>\n";
  for (std::size_t j = 0; j < axes.regions.size(); ++j) {
    svg << "<text x=\"" << kLeft + kCellW * static_cast<int>(j) + kCellW / 2 << "\" y=\"" << kTop - 12
        << "\" text-anchor=\"middle\">" << to_string(axes.regions[j]) << "</text>\n";
  }
  for (std::size_t i = 0; i < axes.classifiers.size(); ++i) {
    const int y = kTop + kCellH * static_cast<int>(i);
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + kCellH / 2 + 4 << "\" text-anchor=\"end\">"
        << xml_escape(axes.classifiers[i]) << "</text>\n";
    for (std::size_t j = 0; j < axes.regions.size(); ++j) {
      const int x = kLeft + kCellW * static_cast<int>(j);
      const EvalCell* cell = find_cell(grid, axes.classifiers[i], axes.regions[j]);
      std::string fill = "url(#absent)";
      std::string label = "n/a";
      std::string ink = "#404040";
      if (cell && cell->auc) {
        const double t = std::clamp((*cell->auc * 100.0 - 50.0) / 50.0, 0.0, 1.0);
        // Light yellow at 50 % to dark red at 100 %.
        const int r = static_cast<int>(std::lround(255.0 + t * (128.0 - 255.0)));
        const int g = static_cast<int>(std::lround(255.0 + t * (0.0 - 255.0)));
        const int b = static_cast<int>(std::lround(204.0 + t * (38.0 - 204.0)));
        char color[8];
        std::snprintf(color, sizeof color, "#%02x%02x%02x", r, g, b);
        fill = color;
        label = format_percent(*cell->auc);
        ink = t > 0.55 ? "#ffffff" : "#000000";
      }
      svg << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCellW << "\" height=\""
          << kCellH << "\" fill=\"" << fill << "\" stroke=\"#ffffff\"/>\n"
          << "<text x=\"" << x + kCellW / 2 << "\" y=\"" << y + kCellH / 2 + 4 << "\" text-anchor=\"middle\" fill=\""
          << ink << "\">" << label << "</text>\n";
    }
  }
  svg << "<text x=\"" << kLeft << "\" y=\"" << height - 10 << "\">AUC (%), color scale 50-100</text>\n</svg>\n";

  auto file = open_output(out);
  file << svg.str();
  if (!file) throw Error(ErrorCode::kIoError, "short write to " + out.string());
}

}  // namespace acbeta
