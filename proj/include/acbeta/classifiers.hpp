#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "acbeta/features.hpp"
#include "acbeta/manifest.hpp"
#include "acbeta/metrics.hpp"
#include "acbeta/regions.hpp"
#include "json.hpp"

namespace acbeta {

struct Sample {
  std::vector<double> features;
  Label label = Label::kReal;
  std::string video_id;
};

struct Dataset {
  RegionKind region = RegionKind::kEntireFrame;
  std::vector<Sample> rows;
};

/// Throws Error(kDimensionMismatch) on ragged rows and
/// Error(kSchemaMismatch) on duplicate video ids.
void validate(const Dataset& dataset);

Dataset make_dataset(RegionKind region, std::span<const VideoDescriptor> descriptors);

// ---- split protocol ----

struct SplitAssignment {
  std::vector<std::string> train_ids;  // each list sorted
  std::vector<std::string> val_ids;
  std::vector<std::string> test_ids;
  std::uint64_t seed = 0;

  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

struct LabeledVideo {
  std::string video_id;
  Label label = Label::kReal;
};

inline constexpr std::size_t kMinVideosPerClass = 10;

/// Per class: seeded shuffle, then a 50/20/30 cut with largest-remainder
/// rounding (leftover videos go to the largest fractional parts, earlier
/// split first on ties). Throws Error(kTooFewVideos) below 10 per class and
/// Error(kSchemaMismatch) on duplicate ids.
SplitAssignment stratified_split(std::span<const LabeledVideo> videos, std::uint64_t seed);
SplitAssignment stratified_split(const Dataset& dataset, std::uint64_t seed);

void save_split(const SplitAssignment& split, const std::filesystem::path& path);
SplitAssignment load_split(const std::filesystem::path& path);

struct DatasetSplit {
  std::vector<Sample> train;
  std::vector<Sample> val;
  std::vector<Sample> test;
};

// Rows of `dataset` routed by the assignment; ids it does not mention are dropped.
DatasetSplit apply_split(const Dataset& dataset, const SplitAssignment& split);

// ---- classifier specifications ----

struct KnnParams {
  std::size_t k = 5;
};

struct LdaParams {
  double epsilon = 1e-6;  // ridge, relative to trace / dim
};

struct TreeParams {
  std::size_t max_features = 0;  // features examined per split; 0 means all
  std::size_t min_samples_split = 2;
};

struct ForestParams {
  std::size_t n_trees = 100;
  bool bootstrap = true;
  std::size_t max_features = 0;  // 0 means round(sqrt(dim))
  std::size_t min_samples_split = 2;
};

using ClassifierSpec = std::variant<KnnParams, LdaParams, TreeParams, ForestParams>;

inline constexpr std::array<std::size_t, 6> kKnnNeighborCounts = {3, 5, 7, 11, 13, 15};

/// "knn_<k>", "lda", "decision_tree" or "random_forest".
std::string setting_key(const ClassifierSpec& spec);
/// "knn", "lda", "decision_tree" or "random_forest".
std::string family_key(const ClassifierSpec& spec);

/// Accepts setting keys ("knn_7", "knn:7", "lda", ...).
ClassifierSpec parse_setting(std::string_view text);

/// Every default setting of a family; "knn" expands to the six k values.
std::vector<ClassifierSpec> family_settings(std::string_view family);

// ---- models ----

class Model {
 public:
  virtual ~Model() = default;

  /// Probability-like score in [0, 1]; larger means more likely fake.
  /// Throws Error(kDimensionMismatch).
  virtual double score(std::span<const double> features) const = 0;

  virtual ClassifierSpec spec() const = 0;
  virtual nlohmann::json state() const = 0;

  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::uint64_t seed() const noexcept { return seed_; }

 protected:
  Model(std::size_t feature_dim, std::uint64_t seed) : feature_dim_(feature_dim), seed_(seed) {}
  void check_dim(std::span<const double> features) const;

 private:
  std::size_t feature_dim_;
  std::uint64_t seed_;
};

using TrainedModel = std::shared_ptr<const Model>;

/// Throws Error(kSingleClassTraining) unless both labels occur and
/// Error(kDimensionMismatch) on ragged rows. Deterministic given `seed`.
TrainedModel train(const ClassifierSpec& spec, std::span<const Sample> rows, std::uint64_t seed);

class KnnModel final : public Model {
 public:
  KnnModel(KnnParams params, std::span<const Sample> rows, std::uint64_t seed);
  KnnModel(KnnParams params, std::vector<std::vector<double>> points, std::vector<bool> is_fake,
           std::uint64_t seed);

  /// Fraction of fake labels among the k nearest training rows (Euclidean),
  /// k clamped to the number of training rows.
  double score(std::span<const double> features) const override;
  ClassifierSpec spec() const override { return params_; }
  nlohmann::json state() const override;

  /// Indices of the k nearest training rows, nearest first; equal distances
  /// go to the lower row index.
  std::vector<std::size_t> neighbors(std::span<const double> features) const;

 private:
  KnnParams params_;
  std::vector<std::vector<double>> points_;
  std::vector<bool> is_fake_;
};

class LdaModel final : public Model {
 public:
  LdaModel(LdaParams params, std::span<const Sample> rows, std::uint64_t seed);
  LdaModel(LdaParams params, std::vector<double> direction, double threshold, std::uint64_t seed);

  /// Logistic of the signed Euclidean distance to the decision hyperplane,
  /// positive on the fake side.
  double score(std::span<const double> features) const override;
  ClassifierSpec spec() const override { return params_; }
  nlohmann::json state() const override;

  // w = S^-1 (mu_fake - mu_real) with the regularized pooled covariance S.
  const std::vector<double>& direction() const noexcept { return direction_; }
  // w . (mu_real + mu_fake) / 2
  double threshold() const noexcept { return threshold_; }

 private:
  LdaParams params_;
  std::vector<double> direction_;
  double threshold_ = 0.0;
  double norm_ = 0.0;
};

// CART node; feature < 0 marks a leaf.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double fake_fraction = 0.0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree final : public Model {
 public:
  /// Gini CART grown until leaves are pure or unsplittable. When
  /// max_features < dim, each split inspects features in a random order drawn
  /// from Rng::derive(seed, stream) and stops after max_features
  /// non-constant ones. `sample` lists the training rows to use (repeats
  /// allowed); empty means all rows.
  DecisionTree(TreeParams params, std::span<const Sample> rows, std::uint64_t seed,
               std::uint64_t stream = 0, std::span<const std::size_t> sample = {});
  DecisionTree(TreeParams params, std::size_t feature_dim, std::vector<TreeNode> nodes,
               std::uint64_t seed);

  double score(std::span<const double> features) const override;
  ClassifierSpec spec() const override { return params_; }
  nlohmann::json state() const override;

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

 private:
  TreeParams params_;
  std::vector<TreeNode> nodes_;
};

class RandomForest final : public Model {
 public:
  /// Tree t grows from stream t of the seed, exactly like a DecisionTree
  /// built with that stream. Bootstrap samples (n draws with replacement)
  /// come from a separate per-tree stream.
  RandomForest(ForestParams params, std::span<const Sample> rows, std::uint64_t seed);
  RandomForest(ForestParams params, std::size_t feature_dim, std::vector<DecisionTree> trees,
               std::uint64_t seed);

  /// Mean of the member trees' leaf fractions.
  double score(std::span<const double> features) const override;
  ClassifierSpec spec() const override { return params_; }
  nlohmann::json state() const override;

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }

 private:
  ForestParams params_;
  std::vector<DecisionTree> trees_;
};

std::vector<ScoredPrediction> score_rows(const Model& model, std::span<const Sample> rows);

struct Selection {
  TrainedModel model;
  std::vector<double> validation_auc;  // one per grid entry; empty for a singleton grid
  std::size_t chosen = 0;
};

/// Trains every setting on `train`, keeps the one with the highest AUC on
/// `val` (first wins ties). A singleton grid skips validation.
Selection select_model(std::span<const ClassifierSpec> grid, std::span<const Sample> train,
                       std::span<const Sample> val, std::uint64_t seed);

// ---- model files ----

nlohmann::json model_to_json(const Model& model);
TrainedModel model_from_json(const nlohmann::json& doc);
void save_model(const Model& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace acbeta
