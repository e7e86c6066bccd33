#include "phishkd/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>

#include "phishkd/error.hpp"
#include "phishkd/mining.hpp"
#include "phishkd/parallel.hpp"

namespace phishkd {
namespace {

constexpr double kPositiveGain = 1e-12;
constexpr std::uint64_t kForestStream = 0x666f72657374ULL;  // "forest"

void check_trainable(const Dataset& ds) {
  if (ds.empty()) throw Error(ErrorCode::EmptyDataset, "cannot train on an empty dataset");
  if (ds.arity() == 0) throw Error(ErrorCode::EmptyDataset, "dataset has no features");
  for (const auto& row : ds.rows) {
    if (row.label == Label::unlabeled) throw Error(ErrorCode::InvalidArgument, "unlabeled training row");
  }
  if (ds.count(Label::ham) == 0 || ds.count(Label::phish) == 0) {
    throw Error(ErrorCode::SingleClass, "training needs both ham and phish rows");
  }
}

TrainedModel model_shell(const Dataset& ds, const ModelParams& params) {
  TrainedModel m;
  m.params = params;
  m.feature_names = ds.feature_names;
  m.kinds = ds.kinds;
  return m;
}

// Column-major copy of the training table.
struct Table {
  std::vector<std::vector<double>> columns;
  std::vector<Label> labels;

  explicit Table(const Dataset& ds) : columns(ds.arity()), labels(ds.labels()) {
    for (std::size_t j = 0; j < ds.arity(); ++j) columns[j] = ds.column(j);
  }
};

class TreeGrower {
 public:
  TreeGrower(const Table& table, const ModelParams& params, Rng* rng)
      : table_(table), params_(params), rng_(rng) {}

  DecisionTree grow(std::vector<std::size_t> rows) {
    DecisionTree tree;
    tree.nodes.emplace_back();
    struct Pending {
      std::int32_t node;
      std::vector<std::size_t> rows;
    };
    std::vector<Pending> stack;
    stack.push_back({0, std::move(rows)});
    while (!stack.empty()) {
      Pending item = std::move(stack.back());
      stack.pop_back();
      auto& node = tree.nodes[static_cast<std::size_t>(item.node)];
      node.counts = count(item.rows);
      const auto choice = choose_split(item.rows, node.counts);
      if (!choice) continue;

      node.feature = static_cast<std::int32_t>(choice->feature);
      node.threshold = choice->threshold;
      std::vector<std::size_t> left;
      std::vector<std::size_t> right;
      const auto& column = table_.columns[choice->feature];
      for (const auto r : item.rows) (column[r] <= choice->threshold ? left : right).push_back(r);

      const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
      const auto right_id = left_id + 1;
      node.left = left_id;
      node.right = right_id;
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      stack.push_back({right_id, std::move(right)});
      stack.push_back({left_id, std::move(left)});
    }
    return tree;
  }

 private:
  struct Choice {
    std::size_t feature;
    double threshold;
    double gain;
    double ratio;
  };

  std::array<std::uint32_t, 2> count(const std::vector<std::size_t>& rows) const {
    std::array<std::uint32_t, 2> c{};
    for (const auto r : rows) ++c[static_cast<std::size_t>(table_.labels[r])];
    return c;
  }

  std::optional<Choice> evaluate(std::size_t feature, const std::vector<std::size_t>& rows) const {
    std::vector<double> values;
    std::vector<Label> labels;
    values.reserve(rows.size());
    labels.reserve(rows.size());
    for (const auto r : rows) {
      values.push_back(table_.columns[feature][r]);
      labels.push_back(table_.labels[r]);
    }
    const auto split = best_threshold_split(values, labels, params_.min_leaf);
    if (!split) return std::nullopt;
    return Choice{feature, split->threshold, split->gain, split->ratio};
  }

  // Higher gain ratio wins; equal ratios go to the lower column index.
  static bool better(const Choice& a, const std::optional<Choice>& b) {
    if (!b) return true;
    if (a.ratio != b->ratio) return a.ratio > b->ratio;
    return a.feature < b->feature;
  }

  bool is_terminal(const std::vector<std::size_t>& rows, const std::array<std::uint32_t, 2>& c) const {
    return c[0] == 0 || c[1] == 0 || rows.size() < 2 * params_.min_leaf;
  }

  bool child_has_positive_gain(const std::vector<std::size_t>& rows, const Choice& split) const {
    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    const auto& column = table_.columns[split.feature];
    for (const auto r : rows) (column[r] <= split.threshold ? left : right).push_back(r);
    for (const auto* side : {&left, &right}) {
      if (is_terminal(*side, count(*side))) continue;
      for (std::size_t j = 0; j < table_.columns.size(); ++j) {
        const auto c = evaluate(j, *side);
        if (c && c->gain > kPositiveGain) return true;
      }
    }
    return false;
  }

  std::optional<Choice> choose_split(const std::vector<std::size_t>& rows,
                                     const std::array<std::uint32_t, 2>& counts) {
    if (is_terminal(rows, counts)) return std::nullopt;
    const std::size_t arity = table_.columns.size();

    std::vector<std::size_t> order(arity);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::size_t first_batch = arity;
    if (rng_) {
      rng_->shuffle(std::span<std::size_t>(order));
      first_batch = std::min(params_.features_per_split, arity);
    }

    std::optional<Choice> best;
    std::vector<Choice> admissible;
    for (std::size_t k = 0; k < arity; ++k) {
      // Past the random subset, keep drawing only until some feature has
      // positive gain.
      if (k >= first_batch && best && best->gain > kPositiveGain) break;
      const auto c = evaluate(order[k], rows);
      if (!c) continue;
      admissible.push_back(*c);
      if (c->gain > kPositiveGain && (!best || best->gain <= kPositiveGain || better(*c, best))) {
        best = c;
      } else if (!best) {
        best = c;
      }
    }
    if (best && best->gain > kPositiveGain) return best;

    // Every admissible split is uninformative on its own (XOR-like data).
    // Take the lowest-index one that exposes a positive-gain split below it.
    std::sort(admissible.begin(), admissible.end(),
              [](const Choice& a, const Choice& b) { return a.feature < b.feature; });
    for (const auto& c : admissible) {
      if (child_has_positive_gain(rows, c)) return c;
    }
    return std::nullopt;
  }

  const Table& table_;
  const ModelParams& params_;
  Rng* rng_;
};

std::vector<std::size_t> draw_bootstrap(Rng& rng, std::size_t rows) {
  std::vector<std::size_t> sample(rows);
  for (auto& s : sample) s = static_cast<std::size_t>(rng.below(rows));
  return sample;
}

Label vote(const std::array<std::uint32_t, 2>& counts, bool ties_to_phish) {
  if (counts[1] > counts[0]) return Label::phish;
  if (counts[1] == counts[0] && ties_to_phish) return Label::phish;
  return Label::ham;
}

Label label_for(double score, bool ties_to_phish) {
  return (score > 0.5 || (score == 0.5 && ties_to_phish)) ? Label::phish : Label::ham;
}

double log_gaussian(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * variance) - d * d / (2.0 * variance);
}

}  // namespace

std::string_view to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::naive_bayes: return "naive_bayes";
    case Algorithm::tree: return "tree";
    case Algorithm::forest: return "forest";
  }
  return "forest";
}

Algorithm parse_algorithm(std::string_view text) {
  if (text == "naive_bayes" || text == "bayes" || text == "nb") return Algorithm::naive_bayes;
  if (text == "tree" || text == "j48" || text == "c45") return Algorithm::tree;
  if (text == "forest" || text == "rf") return Algorithm::forest;
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + std::string(text) + "'");
}

void ModelParams::validate(std::size_t arity) const {
  if (trees < 1) throw Error(ErrorCode::InvalidArgument, "trees must be >= 1");
  if (features_per_split < 1 || features_per_split > arity) {
    throw Error(ErrorCode::InvalidArgument,
                "features_per_split must be in [1, " + std::to_string(arity) + "]");
  }
  if (min_leaf < 1) throw Error(ErrorCode::InvalidArgument, "min_leaf must be >= 1");
  if (!(laplace_alpha >= 0.0)) throw Error(ErrorCode::InvalidArgument, "laplace_alpha must be >= 0");
  if (!(variance_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "variance_floor must be > 0");
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> values) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(values[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i];
}

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> level(nodes.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, level[i]);
    if (!nodes[i].is_leaf()) {
      level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
      level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
    }
  }
  return deepest;
}

TrainedModel train_naive_bayes(const Dataset& ds, const ModelParams& params) {
  check_trainable(ds);
  params.validate(std::max<std::size_t>(ds.arity(), params.features_per_split));
  TrainedModel model = model_shell(ds, params);
  model.params.algorithm = Algorithm::naive_bayes;

  NaiveBayesModel nb;
  for (const auto& row : ds.rows) ++nb.class_counts[static_cast<std::size_t>(row.label)];
  const double n = static_cast<double>(ds.size());
  for (std::size_t c = 0; c < 2; ++c) nb.priors[c] = static_cast<double>(nb.class_counts[c]) / n;

  for (std::size_t j = 0; j < ds.arity(); ++j) {
    NaiveBayesModel::FeatureStats stats;
    stats.kind = ds.kinds[j];
    const double first = ds.rows.front().values[j];
    stats.ignored = std::all_of(ds.rows.begin(), ds.rows.end(),
                                [&](const Row& r) { return r.values[j] == first; });
    std::array<double, 2> sum{};
    std::array<double, 2> ones{};
    for (const auto& row : ds.rows) {
      const auto c = static_cast<std::size_t>(row.label);
      sum[c] += row.values[j];
      ones[c] += row.values[j] > 0.5 ? 1.0 : 0.0;
    }
    for (std::size_t c = 0; c < 2; ++c) {
      const double nc = static_cast<double>(nb.class_counts[c]);
      stats.p_one[c] = (ones[c] + params.laplace_alpha) / (nc + 2.0 * params.laplace_alpha);
      stats.mean[c] = sum[c] / nc;
    }
    std::array<double, 2> squares{};
    for (const auto& row : ds.rows) {
      const auto c = static_cast<std::size_t>(row.label);
      const double d = row.values[j] - stats.mean[c];
      squares[c] += d * d;
    }
    for (std::size_t c = 0; c < 2; ++c) {
      stats.variance[c] =
          std::max(squares[c] / static_cast<double>(nb.class_counts[c]), params.variance_floor);
    }
    nb.features.push_back(stats);
  }
  model.payload = std::move(nb);
  return model;
}

std::array<double, 2> posterior(const NaiveBayesModel& model, std::span<const double> values) {
  std::array<double, 2> log_p{std::log(model.priors[0]), std::log(model.priors[1])};
  for (std::size_t j = 0; j < model.features.size(); ++j) {
    const auto& f = model.features[j];
    if (f.ignored) continue;
    for (std::size_t c = 0; c < 2; ++c) {
      if (f.kind == FeatureKind::binary) {
        const double p = values[j] > 0.5 ? f.p_one[c] : 1.0 - f.p_one[c];
        log_p[c] += std::log(p);
      } else {
        log_p[c] += log_gaussian(values[j], f.mean[c], f.variance[c]);
      }
    }
  }
  // Logistic form keeps both probabilities in [0,1] and summing to 1.
  const double diff = log_p[1] - log_p[0];
  const double phish = 1.0 / (1.0 + std::exp(-diff));
  const double ham = 1.0 / (1.0 + std::exp(diff));
  return {ham, phish};
}

TrainedModel train_tree(const Dataset& ds, const ModelParams& params) {
  check_trainable(ds);
  params.validate(std::max<std::size_t>(ds.arity(), params.features_per_split));
  TrainedModel model = model_shell(ds, params);
  model.params.algorithm = Algorithm::tree;
  const Table table(ds);
  std::vector<std::size_t> rows(ds.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  model.payload = TreeGrower(table, model.params, nullptr).grow(std::move(rows));
  return model;
}

std::vector<std::size_t> bootstrap_sample(std::size_t rows, std::uint64_t seed,
                                          std::size_t tree_index) {
  Rng rng(derive_seed(seed, kForestStream, tree_index));
  return draw_bootstrap(rng, rows);
}

TrainedModel train_forest(const Dataset& ds, const ModelParams& params) {
  check_trainable(ds);
  params.validate(ds.arity());
  TrainedModel model = model_shell(ds, params);
  model.params.algorithm = Algorithm::forest;
  const Table table(ds);

  RandomForest forest;
  forest.trees.resize(params.trees);
  parallel_for(params.trees, params.jobs, [&](std::size_t i) {
    Rng rng(derive_seed(params.seed, kForestStream, i));
    auto rows = draw_bootstrap(rng, ds.size());
    forest.trees[i] = TreeGrower(table, model.params, &rng).grow(std::move(rows));
  });
  model.payload = std::move(forest);
  return model;
}

TrainedModel train(const Dataset& ds, const ModelParams& params) {
  switch (params.algorithm) {
    case Algorithm::naive_bayes: return train_naive_bayes(ds, params);
    case Algorithm::tree: return train_tree(ds, params);
    case Algorithm::forest: return train_forest(ds, params);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

Prediction predict(const TrainedModel& model, std::span<const double> values) {
  if (values.size() != model.feature_names.size()) {
    throw Error(ErrorCode::ArityMismatch, "model expects " + std::to_string(model.feature_names.size()) +
                                              " features, got " + std::to_string(values.size()));
  }
  const bool ties = model.params.ties_to_phish;
  Prediction p;
  if (const auto* nb = std::get_if<NaiveBayesModel>(&model.payload)) {
    p.score = posterior(*nb, values)[1];
  } else if (const auto* tree = std::get_if<DecisionTree>(&model.payload)) {
    const auto& leaf = tree->leaf_for(values);
    p.score = static_cast<double>(leaf.counts[1]) / static_cast<double>(leaf.counts[0] + leaf.counts[1]);
  } else {
    const auto& forest = std::get<RandomForest>(model.payload);
    std::size_t votes = 0;
    for (const auto& t : forest.trees) votes += vote(t.leaf_for(values).counts, ties) == Label::phish;
    p.score = static_cast<double>(votes) / static_cast<double>(forest.trees.size());
  }
  p.label = label_for(p.score, ties);
  return p;
}

Prediction predict(const TrainedModel& model, const FeatureVector& fv) {
  return predict(model, std::span<const double>(fv.values));
}

}  // namespace phishkd
