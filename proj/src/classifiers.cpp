#include "acbeta/classifiers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "acbeta/error.hpp"
#include "acbeta/random.hpp"

namespace acbeta {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- datasets -----------------------------------------------------------

void validate(const Dataset& dataset) {
  std::set<std::string> ids;
  for (const auto& row : dataset.rows) {
    if (row.features.size() != dataset.rows.front().features.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "ragged feature vectors in dataset");
    }
    if (!ids.insert(row.video_id).second) {
      throw Error(ErrorCode::kSchemaMismatch, "duplicate video_id '" + row.video_id + "' in dataset");
    }
  }
}

Dataset make_dataset(RegionKind region, std::span<const VideoDescriptor> descriptors) {
  Dataset dataset{region, {}};
  for (const auto& d : descriptors) {
    if (d.region != region) {
      throw Error(ErrorCode::kSchemaMismatch, "descriptor for " + d.video_id + " belongs to region " +
                                                  std::string(to_string(d.region)));
    }
    dataset.rows.push_back({std::vector<double>(d.mean_betas.begin(), d.mean_betas.end()), d.label,
                            d.video_id});
  }
  validate(dataset);
  return dataset;
}

// ---- split --------------------------------------------------------------

namespace {

// Largest-remainder apportionment of n into 50/20/30.
std::array<std::size_t, 3> split_sizes(std::size_t n) {
  constexpr std::array<std::size_t, 3> kPercent = {50, 20, 30};
  std::array<std::size_t, 3> sizes{};
  std::array<std::size_t, 3> remainders{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    sizes[i] = n * kPercent[i] / 100;
    remainders[i] = n * kPercent[i] % 100;
    assigned += sizes[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i]];
  return sizes;
}

}  // namespace

SplitAssignment stratified_split(std::span<const LabeledVideo> videos, std::uint64_t seed) {
  std::array<std::vector<std::string>, 2> by_class;
  std::set<std::string> seen;
  for (const auto& v : videos) {
    if (!seen.insert(v.video_id).second) {
      throw Error(ErrorCode::kSchemaMismatch, "duplicate video_id '" + v.video_id + "'");
    }
    by_class[v.label == Label::kFake ? 1 : 0].push_back(v.video_id);
  }
  SplitAssignment split;
  split.seed = seed;
  for (std::size_t c = 0; c < 2; ++c) {
    auto& ids = by_class[c];
    if (ids.size() < kMinVideosPerClass) {
      throw Error(ErrorCode::kTooFewVideos,
                  std::to_string(ids.size()) + " " + std::string(to_string(c ? Label::kFake : Label::kReal)) +
                      " videos; need at least " + std::to_string(kMinVideosPerClass));
    }
    // Input order must not matter, only the seed.
    std::sort(ids.begin(), ids.end());
    Rng rng = Rng::derive(seed, c);
    rng.shuffle(std::span<std::string>(ids));
    const auto sizes = split_sizes(ids.size());
    auto it = ids.begin();
    split.train_ids.insert(split.train_ids.end(), it, it + static_cast<std::ptrdiff_t>(sizes[0]));
    it += static_cast<std::ptrdiff_t>(sizes[0]);
    split.val_ids.insert(split.val_ids.end(), it, it + static_cast<std::ptrdiff_t>(sizes[1]));
    it += static_cast<std::ptrdiff_t>(sizes[1]);
    split.test_ids.insert(split.test_ids.end(), it, ids.end());
  }
  std::sort(split.train_ids.begin(), split.train_ids.end());
  std::sort(split.val_ids.begin(), split.val_ids.end());
  std::sort(split.test_ids.begin(), split.test_ids.end());
  return split;
}

SplitAssignment stratified_split(const Dataset& dataset, std::uint64_t seed) {
  std::vector<LabeledVideo> videos;
  for (const auto& row : dataset.rows) videos.push_back({row.video_id, row.label});
  return stratified_split(videos, seed);
}

void save_split(const SplitAssignment& split, const fs::path& path) {
  const json doc = {{"seed", split.seed},
                    {"train", split.train_ids},
                    {"val", split.val_ids},
                    {"test", split.test_ids}};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

SplitAssignment load_split(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  SplitAssignment split;
  try {
    const json doc = json::parse(in);
    split.seed = doc.at("seed").get<std::uint64_t>();
    split.train_ids = doc.at("train").get<std::vector<std::string>>();
    split.val_ids = doc.at("val").get<std::vector<std::string>>();
    split.test_ids = doc.at("test").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  std::set<std::string> all;
  for (const auto* list : {&split.train_ids, &split.val_ids, &split.test_ids}) {
    for (const auto& id : *list) {
      if (!all.insert(id).second) {
        throw Error(ErrorCode::kSchemaMismatch, "video '" + id + "' appears in two splits");
      }
    }
  }
  return split;
}

DatasetSplit apply_split(const Dataset& dataset, const SplitAssignment& split) {
  std::map<std::string, int> where;
  for (const auto& id : split.train_ids) where[id] = 0;
  for (const auto& id : split.val_ids) where[id] = 1;
  for (const auto& id : split.test_ids) where[id] = 2;
  DatasetSplit out;
  for (const auto& row : dataset.rows) {
    const auto it = where.find(row.video_id);
    if (it == where.end()) continue;
    (it->second == 0 ? out.train : it->second == 1 ? out.val : out.test).push_back(row);
  }
  return out;
}

// ---- specs --------------------------------------------------------------

std::string setting_key(const ClassifierSpec& spec) {
  if (const auto* knn = std::get_if<KnnParams>(&spec)) return "knn_" + std::to_string(knn->k);
  return family_key(spec);
}

std::string family_key(const ClassifierSpec& spec) {
  switch (spec.index()) {
    case 0: return "knn";
    case 1: return "lda";
    case 2: return "decision_tree";
    default: return "random_forest";
  }
}

ClassifierSpec parse_setting(std::string_view text) {
  if (text.starts_with("knn_") || text.starts_with("knn:")) {
    const std::string digits(text.substr(4));
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw Error(ErrorCode::kParseError, "bad k in '" + std::string(text) + "'");
    }
    const auto k = std::stoul(digits);
    if (k == 0) throw Error(ErrorCode::kParseError, "k must be positive");
    return KnnParams{k};
  }
  if (text == "lda") return LdaParams{};
  if (text == "decision_tree") return TreeParams{};
  if (text == "random_forest") return ForestParams{};
  throw Error(ErrorCode::kParseError, "unknown classifier setting '" + std::string(text) + "'");
}

std::vector<ClassifierSpec> family_settings(std::string_view family) {
  if (family == "knn") {
    std::vector<ClassifierSpec> grid;
    for (const auto k : kKnnNeighborCounts) grid.emplace_back(KnnParams{k});
    return grid;
  }
  if (family == "lda" || family == "decision_tree" || family == "random_forest") {
    return {parse_setting(family)};
  }
  throw Error(ErrorCode::kParseError, "unknown classifier family '" + std::string(family) + "'");
}

// ---- shared helpers -----------------------------------------------------

void Model::check_dim(std::span<const double> features) const {
  if (features.size() != feature_dim_) {
    throw Error(ErrorCode::kDimensionMismatch, "model expects " + std::to_string(feature_dim_) +
                                                   " features, got " + std::to_string(features.size()));
  }
}

namespace {

std::size_t checked_dim(std::span<const Sample> rows) {
  if (rows.empty()) throw Error(ErrorCode::kSingleClassTraining, "no training rows");
  const std::size_t dim = rows.front().features.size();
  bool real = false;
  bool fake = false;
  for (const auto& r : rows) {
    if (r.features.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "ragged training rows");
    (r.label == Label::kFake ? fake : real) = true;
  }
  if (!real || !fake) throw Error(ErrorCode::kSingleClassTraining, "training rows contain one class only");
  if (dim == 0) throw Error(ErrorCode::kDimensionMismatch, "zero-dimensional features");
  return dim;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

// ---- k-NN ---------------------------------------------------------------

KnnModel::KnnModel(KnnParams params, std::span<const Sample> rows, std::uint64_t seed)
    : Model(checked_dim(rows), seed), params_(params) {
  if (params_.k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");
  for (const auto& r : rows) {
    points_.push_back(r.features);
    is_fake_.push_back(r.label == Label::kFake);
  }
}

KnnModel::KnnModel(KnnParams params, std::vector<std::vector<double>> points, std::vector<bool> is_fake,
                   std::uint64_t seed)
    : Model(points.empty() ? 0 : points.front().size(), seed),
      params_(params),
      points_(std::move(points)),
      is_fake_(std::move(is_fake)) {
  if (points_.empty() || points_.size() != is_fake_.size() || params_.k == 0) {
    throw Error(ErrorCode::kParseError, "inconsistent k-NN state");
  }
}

std::vector<std::size_t> KnnModel::neighbors(std::span<const double> features) const {
  check_dim(features);
  std::vector<std::pair<double, std::size_t>> ranked(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) ranked[i] = {squared_distance(points_[i], features), i};
  const std::size_t k = std::min(params_.k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = ranked[i].second;
  return out;
}

double KnnModel::score(std::span<const double> features) const {
  const auto nearest = neighbors(features);
  std::size_t fakes = 0;
  for (const auto i : nearest) fakes += is_fake_[i] ? 1 : 0;
  return static_cast<double>(fakes) / static_cast<double>(nearest.size());
}

json KnnModel::state() const {
  std::vector<int> labels;
  for (const bool f : is_fake_) labels.push_back(f ? 1 : 0);
  return {{"points", points_}, {"is_fake", labels}};
}

// ---- LDA ----------------------------------------------------------------

LdaModel::LdaModel(LdaParams params, std::span<const Sample> rows, std::uint64_t seed)
    : Model(checked_dim(rows), seed), params_(params) {
  const auto dim = static_cast<Eigen::Index>(feature_dim());
  std::array<Eigen::VectorXd, 2> mean = {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Zero(dim)};
  std::array<double, 2> count = {0.0, 0.0};
  for (const auto& r : rows) {
    const int c = r.label == Label::kFake ? 1 : 0;
    mean[c] += Eigen::Map<const Eigen::VectorXd>(r.features.data(), dim);
    count[c] += 1.0;
  }
  mean[0] /= count[0];
  mean[1] /= count[1];

  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& r : rows) {
    const int c = r.label == Label::kFake ? 1 : 0;
    const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(r.features.data(), dim) - mean[c];
    scatter.noalias() += d * d.transpose();
  }
  const double n = count[0] + count[1];
  scatter /= n > 2.0 ? n - 2.0 : n;
  const double trace = scatter.trace();
  const double ridge = params_.epsilon * (trace > 0.0 ? trace / static_cast<double>(dim) : 1.0);
  scatter.diagonal().array() += ridge;

  const Eigen::VectorXd w = scatter.ldlt().solve(mean[1] - mean[0]);
  direction_.assign(w.data(), w.data() + dim);
  threshold_ = w.dot(0.5 * (mean[0] + mean[1]));
  norm_ = w.norm();
  if (!std::isfinite(norm_) || !std::isfinite(threshold_)) {
    throw Error(ErrorCode::kInvalidArgument, "LDA solve produced non-finite values");
  }
}

LdaModel::LdaModel(LdaParams params, std::vector<double> direction, double threshold, std::uint64_t seed)
    : Model(direction.size(), seed), params_(params), direction_(std::move(direction)), threshold_(threshold) {
  if (direction_.empty()) throw Error(ErrorCode::kParseError, "empty LDA direction");
  norm_ = std::sqrt(std::inner_product(direction_.begin(), direction_.end(), direction_.begin(), 0.0));
}

double LdaModel::score(std::span<const double> features) const {
  check_dim(features);
  if (norm_ == 0.0) return 0.5;
  const double projection = std::inner_product(features.begin(), features.end(), direction_.begin(), 0.0);
  const double distance = (projection - threshold_) / norm_;
  return 1.0 / (1.0 + std::exp(-distance));
}

json LdaModel::state() const { return {{"direction", direction_}, {"threshold", threshold_}}; }

// ---- decision tree ------------------------------------------------------

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  // Maximize (sumsq_left / n_left + sumsq_right / n_right), the Gini-optimal
  // criterion, compared exactly as num / den.
  unsigned __int128 num = 0;
  unsigned __int128 den = 1;
};

bool better(unsigned __int128 num, unsigned __int128 den, const SplitChoice& best) {
  return best.feature < 0 || num * best.den > best.num * den;
}

class TreeGrower {
 public:
  TreeGrower(const TreeParams& params, std::span<const Sample> rows, Rng rng)
      : params_(params), rows_(rows), dim_(rows.front().features.size()), rng_(std::move(rng)) {}

  std::vector<TreeNode> grow(std::vector<std::size_t> root) {
    std::vector<TreeNode> nodes(1);
    std::vector<std::pair<int, std::vector<std::size_t>>> pending;
    pending.emplace_back(0, std::move(root));
    while (!pending.empty()) {
      auto [node, idx] = std::move(pending.back());
      pending.pop_back();
      std::size_t fakes = 0;
      for (const auto i : idx) fakes += rows_[i].label == Label::kFake ? 1 : 0;
      nodes[node].fake_fraction = static_cast<double>(fakes) / static_cast<double>(idx.size());
      if (fakes == 0 || fakes == idx.size() || idx.size() < params_.min_samples_split) continue;

      const SplitChoice choice = best_split(idx);
      if (choice.feature < 0) continue;

      std::vector<std::size_t> left;
      std::vector<std::size_t> right;
      for (const auto i : idx) {
        (rows_[i].features[choice.feature] <= choice.threshold ? left : right).push_back(i);
      }
      const int left_id = static_cast<int>(nodes.size());
      nodes[node].feature = choice.feature;
      nodes[node].threshold = choice.threshold;
      nodes[node].left = left_id;
      nodes[node].right = left_id + 1;
      nodes.emplace_back();
      nodes.emplace_back();
      pending.emplace_back(left_id + 1, std::move(right));
      pending.emplace_back(left_id, std::move(left));
    }
    return nodes;
  }

 private:
  SplitChoice best_split(const std::vector<std::size_t>& idx) {
    std::vector<std::size_t> order(dim_);
    std::iota(order.begin(), order.end(), 0);
    const std::size_t limit = params_.max_features == 0 ? dim_ : std::min(params_.max_features, dim_);
    if (limit < dim_) rng_.shuffle(std::span<std::size_t>(order));

    std::size_t total_fakes = 0;
    for (const auto i : idx) total_fakes += rows_[i].label == Label::kFake ? 1 : 0;
    const std::uint64_t n = idx.size();

    SplitChoice best;
    std::size_t examined = 0;
    std::vector<std::pair<double, bool>> values(idx.size());
    for (const auto feature : order) {
      if (examined >= limit) break;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        values[j] = {rows_[idx[j]].features[feature], rows_[idx[j]].label == Label::kFake};
      }
      std::sort(values.begin(), values.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      if (values.front().first == values.back().first) continue;
      ++examined;

      std::uint64_t left_fakes = 0;
      for (std::size_t j = 0; j + 1 < values.size(); ++j) {
        left_fakes += values[j].second ? 1 : 0;
        if (values[j].first == values[j + 1].first) continue;
        const std::uint64_t nl = j + 1;
        const std::uint64_t nr = n - nl;
        const std::uint64_t fl = left_fakes;
        const std::uint64_t rl = nl - fl;
        const std::uint64_t fr = total_fakes - fl;
        const std::uint64_t rr = nr - fr;
        const unsigned __int128 sl = static_cast<unsigned __int128>(fl) * fl + static_cast<unsigned __int128>(rl) * rl;
        const unsigned __int128 sr = static_cast<unsigned __int128>(fr) * fr + static_cast<unsigned __int128>(rr) * rr;
        const unsigned __int128 num = sl * nr + sr * nl;
        const unsigned __int128 den = static_cast<unsigned __int128>(nl) * nr;
        if (better(num, den, best)) {
          const double lo = values[j].first;
          const double hi = values[j + 1].first;
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid >= lo && mid < hi)) mid = lo;
          best = {static_cast<int>(feature), mid, num, den};
        }
      }
    }
    return best;
  }

  const TreeParams& params_;
  std::span<const Sample> rows_;
  std::size_t dim_;
  Rng rng_;
};

}  // namespace

DecisionTree::DecisionTree(TreeParams params, std::span<const Sample> rows, std::uint64_t seed,
                           std::uint64_t stream, std::span<const std::size_t> sample)
    : Model(checked_dim(rows), seed), params_(params) {
  std::vector<std::size_t> root(sample.begin(), sample.end());
  if (root.empty()) {
    root.resize(rows.size());
    std::iota(root.begin(), root.end(), 0);
  }
  TreeGrower grower(params_, rows, Rng::derive(seed, stream));
  nodes_ = grower.grow(std::move(root));
}

DecisionTree::DecisionTree(TreeParams params, std::size_t feature_dim, std::vector<TreeNode> nodes,
                           std::uint64_t seed)
    : Model(feature_dim, seed), params_(params), nodes_(std::move(nodes)) {
  const auto count = static_cast<int>(nodes_.size());
  if (nodes_.empty()) throw Error(ErrorCode::kParseError, "empty tree");
  for (int i = 0; i < count; ++i) {
    const auto& node = nodes_[static_cast<std::size_t>(i)];
    if (node.feature >= 0 && (node.feature >= static_cast<int>(feature_dim) || node.left <= i ||
                              node.right <= i || node.left >= count || node.right >= count)) {
      throw Error(ErrorCode::kParseError, "malformed tree node " + std::to_string(i));
    }
  }
}

double DecisionTree::score(std::span<const double> features) const {
  check_dim(features);
  std::size_t node = 0;
  while (nodes_[node].feature >= 0) {
    const auto& n = nodes_[node];
    node = static_cast<std::size_t>(features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[node].fake_fraction;
}

json DecisionTree::state() const {
  json nodes = json::array();
  for (const auto& n : nodes_) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.fake_fraction});
  return {{"nodes", std::move(nodes)}};
}

// ---- random forest ------------------------------------------------------

namespace {

TreeParams member_params(const ForestParams& params, std::size_t dim) {
  std::size_t features = params.max_features;
  if (features == 0) {
    features = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(dim))));
  }
  return {std::clamp<std::size_t>(features, 1, dim), params.min_samples_split};
}

}  // namespace

RandomForest::RandomForest(ForestParams params, std::span<const Sample> rows, std::uint64_t seed)
    : Model(checked_dim(rows), seed), params_(params) {
  if (params_.n_trees == 0) throw Error(ErrorCode::kInvalidArgument, "forest needs at least one tree");
  const TreeParams tree_params = member_params(params_, feature_dim());
  trees_.reserve(params_.n_trees);
  for (std::size_t t = 0; t < params_.n_trees; ++t) {
    std::vector<std::size_t> sample;
    if (params_.bootstrap) {
      Rng draws = Rng::derive(~seed, t);
      sample.resize(rows.size());
      for (auto& s : sample) s = static_cast<std::size_t>(draws.uniform_index(rows.size()));
      // A single-class bootstrap still yields a valid (constant) tree.
    }
    trees_.emplace_back(tree_params, rows, seed, t, sample);
  }
}

RandomForest::RandomForest(ForestParams params, std::size_t feature_dim, std::vector<DecisionTree> trees,
                           std::uint64_t seed)
    : Model(feature_dim, seed), params_(params), trees_(std::move(trees)) {
  if (trees_.empty()) throw Error(ErrorCode::kParseError, "forest without trees");
}

double RandomForest::score(std::span<const double> features) const {
  check_dim(features);
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.score(features);
  return sum / static_cast<double>(trees_.size());
}

json RandomForest::state() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(t.state());
  return {{"trees", std::move(trees)}};
}

// ---- training and selection ---------------------------------------------

TrainedModel train(const ClassifierSpec& spec, std::span<const Sample> rows, std::uint64_t seed) {
  return std::visit(
      [&](const auto& params) -> TrainedModel {
        using P = std::decay_t<decltype(params)>;
        if constexpr (std::is_same_v<P, KnnParams>) return std::make_shared<KnnModel>(params, rows, seed);
        if constexpr (std::is_same_v<P, LdaParams>) return std::make_shared<LdaModel>(params, rows, seed);
        if constexpr (std::is_same_v<P, TreeParams>) return std::make_shared<DecisionTree>(params, rows, seed);
        if constexpr (std::is_same_v<P, ForestParams>) return std::make_shared<RandomForest>(params, rows, seed);
      },
      spec);
}

std::vector<ScoredPrediction> score_rows(const Model& model, std::span<const Sample> rows) {
  std::vector<ScoredPrediction> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r.video_id, model.score(r.features), r.label});
  return out;
}

Selection select_model(std::span<const ClassifierSpec> grid, std::span<const Sample> train_rows,
                       std::span<const Sample> val_rows, std::uint64_t seed) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "empty classifier grid");
  Selection selection;
  if (grid.size() == 1) {
    selection.model = train(grid.front(), train_rows, seed);
    return selection;
  }
  double best = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto model = train(grid[i], train_rows, seed);
    const auto predictions = score_rows(*model, val_rows);
    const double value = auc(predictions);
    selection.validation_auc.push_back(value);
    if (value > best) {
      best = value;
      selection.model = std::move(model);
      selection.chosen = i;
    }
  }
  return selection;
}

// ---- model files --------------------------------------------------------

namespace {

json hyperparameters(const ClassifierSpec& spec) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, KnnParams>) return {{"k", p.k}};
        if constexpr (std::is_same_v<P, LdaParams>) return {{"epsilon", p.epsilon}};
        if constexpr (std::is_same_v<P, TreeParams>) {
          return {{"max_features", p.max_features}, {"min_samples_split", p.min_samples_split}};
        }
        if constexpr (std::is_same_v<P, ForestParams>) {
          return {{"n_trees", p.n_trees},
                  {"bootstrap", p.bootstrap},
                  {"max_features", p.max_features},
                  {"min_samples_split", p.min_samples_split}};
        }
      },
      spec);
}

DecisionTree tree_from_json(const TreeParams& params, std::size_t dim, const json& state, std::uint64_t seed) {
  std::vector<TreeNode> nodes;
  for (const auto& n : state.at("nodes")) {
    nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                     n.at(4).get<double>()});
  }
  return DecisionTree(params, dim, std::move(nodes), seed);
}

}  // namespace

json model_to_json(const Model& model) {
  const auto spec = model.spec();
  return {{"kind", family_key(spec)},
          {"setting", setting_key(spec)},
          {"seed", model.seed()},
          {"feature_dim", model.feature_dim()},
          {"hyperparameters", hyperparameters(spec)},
          {"state", model.state()}};
}

TrainedModel model_from_json(const json& doc) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    const auto seed = doc.at("seed").get<std::uint64_t>();
    const auto dim = doc.at("feature_dim").get<std::size_t>();
    const json& hp = doc.at("hyperparameters");
    const json& state = doc.at("state");
    TrainedModel model;
    if (kind == "knn") {
      std::vector<bool> is_fake;
      for (const auto& v : state.at("is_fake")) is_fake.push_back(v.get<int>() != 0);
      model = std::make_shared<KnnModel>(KnnParams{hp.at("k").get<std::size_t>()},
                                         state.at("points").get<std::vector<std::vector<double>>>(),
                                         std::move(is_fake), seed);
    } else if (kind == "lda") {
      model = std::make_shared<LdaModel>(LdaParams{hp.at("epsilon").get<double>()},
                                         state.at("direction").get<std::vector<double>>(),
                                         state.at("threshold").get<double>(), seed);
    } else if (kind == "decision_tree") {
      const TreeParams params{hp.at("max_features").get<std::size_t>(),
                              hp.at("min_samples_split").get<std::size_t>()};
      model = std::make_shared<DecisionTree>(tree_from_json(params, dim, state, seed));
    } else if (kind == "random_forest") {
      const ForestParams params{hp.at("n_trees").get<std::size_t>(), hp.at("bootstrap").get<bool>(),
                                hp.at("max_features").get<std::size_t>(),
                                hp.at("min_samples_split").get<std::size_t>()};
      const TreeParams tree_params = member_params(params, dim);
      std::vector<DecisionTree> trees;
      for (const auto& t : state.at("trees")) trees.push_back(tree_from_json(tree_params, dim, t, seed));
      model = std::make_shared<RandomForest>(params, dim, std::move(trees), seed);
    } else {
      throw Error(ErrorCode::kSchemaMismatch, "unknown model kind '" + kind + "'");
    }
    if (model->feature_dim() != dim) throw Error(ErrorCode::kSchemaMismatch, "feature_dim mismatch");
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("model file: ") + e.what());
  }
}

void save_model(const Model& model, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << model_to_json(model).dump() << '\n';
}

TrainedModel load_model(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace acbeta
