#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phishkd/corpus.hpp"
#include "phishkd/features.hpp"
#include "phishkd/random.hpp"

namespace phishkd {

enum class Algorithm { naive_bayes, tree, forest };

std::string_view to_string(Algorithm algorithm) noexcept;
Algorithm parse_algorithm(std::string_view text);

struct ModelParams {
  Algorithm algorithm = Algorithm::forest;
  std::size_t trees = 30;
  std::size_t features_per_split = 4;  // ceil(sqrt(16))
  std::size_t min_leaf = 2;
  double laplace_alpha = 1.0;
  double variance_floor = 1e-9;
  std::uint64_t seed = kDefaultSeed;
  bool ties_to_phish = true;

  // Not part of the model: worker threads for forest training.
  unsigned jobs = 1;

  // Throws InvalidArgument when a field is out of range for `arity` features.
  void validate(std::size_t arity) const;
};

struct TreeNode {
  static constexpr std::int32_t kLeaf = -1;

  std::int32_t feature = kLeaf;
  double threshold = 0.0;  // go left when value <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<std::uint32_t, 2> counts{};  // training rows reaching the node: {ham, phish}

  bool is_leaf() const noexcept { return feature == kLeaf; }
  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> values) const;
  std::size_t depth() const;
  bool operator==(const DecisionTree&) const = default;
};

struct NaiveBayesModel {
  struct FeatureStats {
    FeatureKind kind = FeatureKind::numeric;
    bool ignored = false;  // constant over the training set
    std::array<double, 2> p_one{};  // binary: smoothed P(x=1 | class)
    std::array<double, 2> mean{};
    std::array<double, 2> variance{};

    bool operator==(const FeatureStats&) const = default;
  };

  std::array<std::size_t, 2> class_counts{};
  std::array<double, 2> priors{};
  std::vector<FeatureStats> features;

  bool operator==(const NaiveBayesModel&) const = default;
};

struct RandomForest {
  std::vector<DecisionTree> trees;

  bool operator==(const RandomForest&) const = default;
};

inline constexpr int kModelFormatVersion = 1;

struct TrainedModel {
  int format_version = kModelFormatVersion;
  ModelParams params;
  std::vector<std::string> feature_names;
  std::vector<FeatureKind> kinds;
  std::variant<NaiveBayesModel, DecisionTree, RandomForest> payload;
  // Free-form string pairs recorded by the caller (e.g. extraction options).
  std::map<std::string, std::string> metadata;
};

struct Prediction {
  Label label = Label::ham;
  double score = 0.0;  // confidence that the email is phishing
};

// All trainers throw EmptyDataset and SingleClass.
TrainedModel train_naive_bayes(const Dataset& ds, const ModelParams& params);
TrainedModel train_tree(const Dataset& ds, const ModelParams& params);
TrainedModel train_forest(const Dataset& ds, const ModelParams& params);
TrainedModel train(const Dataset& ds, const ModelParams& params);

// Row indices of the bootstrap sample drawn for forest tree `tree_index`.
std::vector<std::size_t> bootstrap_sample(std::size_t rows, std::uint64_t seed,
                                          std::size_t tree_index);

// Throws ArityMismatch.
Prediction predict(const TrainedModel& model, std::span<const double> values);
Prediction predict(const TrainedModel& model, const FeatureVector& fv);

// Per-class posterior {ham, phish} of a naive Bayes model.
std::array<double, 2> posterior(const NaiveBayesModel& model, std::span<const double> values);

// Versioned JSON. Numbers use shortest round-trip formatting, so
// serialize(deserialize(s)) == s for any s produced here.
std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view json);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace phishkd
