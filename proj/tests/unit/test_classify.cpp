#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "phishkd/classify.hpp"
#include "phishkd/error.hpp"

using namespace phishkd;

namespace {

double training_accuracy(const TrainedModel& m, const Dataset& ds) {
  std::size_t right = 0;
  for (const auto& row : ds.rows) right += predict(m, std::span<const double>(row.values)).label == row.label;
  return static_cast<double>(right) / static_cast<double>(ds.size());
}

Dataset xor_dataset() {
  auto ds = Dataset::with_schema({"a", "b"}, {FeatureKind::binary, FeatureKind::binary});
  ds.add(Row{{0, 0}, Label::ham, ""});
  ds.add(Row{{0, 1}, Label::phish, ""});
  ds.add(Row{{1, 0}, Label::phish, ""});
  ds.add(Row{{1, 1}, Label::ham, ""});
  return ds;
}

Dataset priors_only() {
  auto ds = Dataset::with_schema({"flag", "count"}, {FeatureKind::binary, FeatureKind::numeric});
  for (int i = 0; i < 10; ++i) ds.add(Row{{1.0, 5.0}, i < 6 ? Label::ham : Label::phish, ""});
  return ds;
}

ModelParams params_for(Algorithm a) {
  ModelParams p;
  p.algorithm = a;
  return p;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("naive Bayes with constant features returns the prior") {
    const auto model = train_naive_bayes(priors_only(), {});
    for (const auto& probe : {std::vector<double>{1.0, 5.0}, {0.0, 0.0}, {1.0, 1e6}}) {
      const auto p = predict(model, std::span<const double>(probe));
      CHECK(std::fabs(p.score - 0.4) <= 1e-9);
      CHECK(p.label == Label::ham);
    }
  }

  TEST_CASE("naive Bayes on one perfectly correlated binary feature") {
    auto ds = Dataset::with_schema({"x"}, {FeatureKind::binary});
    for (int i = 0; i < 20; ++i) ds.add(Row{{static_cast<double>(i % 2)}, i % 2 ? Label::phish : Label::ham, ""});
    CHECK(training_accuracy(train_naive_bayes(ds, {}), ds) == 1.0);
  }

  TEST_CASE("naive Bayes posterior sums to one") {
    const auto ds = testing::threshold_dataset(60, 5, 2, 40.0, 8);
    const auto model = train_naive_bayes(ds, {});
    const auto& nb = std::get<NaiveBayesModel>(model.payload);
    for (const auto& row : ds.rows) {
      const auto post = posterior(nb, row.values);
      CHECK(std::fabs(post[0] + post[1] - 1.0) <= 1e-12);
      CHECK(post[1] >= 0.0);
      CHECK(post[1] <= 1.0);
    }
  }

  TEST_CASE("trainers reject degenerate data") {
    const auto empty = Dataset::with_schema({"x"}, {FeatureKind::numeric});
    auto single = empty;
    single.add(Row{{1.0}, Label::ham, ""});
    single.add(Row{{2.0}, Label::ham, ""});
    for (const auto a : {Algorithm::naive_bayes, Algorithm::tree, Algorithm::forest}) {
      auto p = params_for(a);
      p.features_per_split = 1;
      CHECK(code_of([&] { train(empty, p); }) == ErrorCode::EmptyDataset);
      CHECK(code_of([&] { train(single, p); }) == ErrorCode::SingleClass);
    }
  }

  TEST_CASE("tree solves XOR") {
    ModelParams p;
    p.min_leaf = 1;
    const auto ds = xor_dataset();
    const auto model = train_tree(ds, p);
    const auto& tree = std::get<DecisionTree>(model.payload);
    CHECK(tree.depth() == 2);
    CHECK(training_accuracy(model, ds) == 1.0);
  }

  TEST_CASE("tree root split at the midpoint") {
    auto ds = Dataset::with_schema({"x"}, {FeatureKind::numeric});
    const Label y[] = {Label::ham, Label::ham, Label::phish, Label::phish};
    for (int i = 0; i < 4; ++i) ds.add(Row{{static_cast<double>(i + 1)}, y[i], ""});
    const auto model = train_tree(ds, {});
    const auto& root = std::get<DecisionTree>(model.payload).nodes[0];
    CHECK(root.feature == 0);
    CHECK(root.threshold == 2.5);
  }

  TEST_CASE("pure nodes are leaves and leaves are never empty") {
    const auto ds = testing::threshold_dataset(50, 4, 1, 30.0, 2);
    const auto model = train_tree(ds, {});
    for (const auto& n : std::get<DecisionTree>(model.payload).nodes) {
      CHECK(n.counts[0] + n.counts[1] > 0);
      if (n.counts[0] == 0 || n.counts[1] == 0) CHECK(n.is_leaf());
    }
  }

  TEST_CASE("single-threshold separable data is learned exactly") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const auto ds = testing::threshold_dataset(20 + seed * 3, 6, seed % 6, 50.0, seed);
      CHECK(training_accuracy(train_tree(ds, {}), ds) == 1.0);
      ModelParams fp;
      fp.seed = seed;
      CHECK(training_accuracy(train_forest(ds, fp), ds) == 1.0);
    }
  }

  TEST_CASE("forest on a separable 40-row set") {
    const auto ds = testing::threshold_dataset(40, 16, 5, 25.0, 40);
    ModelParams p;
    p.trees = 30;
    const auto model = train_forest(ds, p);
    CHECK(training_accuracy(model, ds) == 1.0);
    const auto& forest = std::get<RandomForest>(model.payload);
    CHECK(forest.trees.size() == 30);
    for (const auto& row : ds.rows) {
      const auto pr = predict(model, std::span<const double>(row.values));
      const double votes = pr.score * 30.0;
      CHECK(std::fabs(votes - std::round(votes)) < 1e-9);
      // Votes recomputed tree by tree.
      std::size_t phish_votes = 0;
      for (const auto& t : forest.trees) {
        const auto& leaf = t.leaf_for(row.values);
        phish_votes += leaf.counts[1] >= leaf.counts[0];
      }
      CHECK(pr.score == static_cast<double>(phish_votes) / 30.0);
    }
  }

  TEST_CASE("one unrestricted forest tree equals a tree on its bootstrap sample") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto ds = testing::threshold_dataset(30, 16, 3, 40.0, seed + 100);
      ModelParams p;
      p.trees = 1;
      p.features_per_split = 16;
      p.seed = seed;
      const auto forest = train_forest(ds, p);
      const auto sample = bootstrap_sample(ds.size(), seed, 0);
      CHECK(sample.size() == ds.size());
      const auto tree = train_tree(ds.subset(sample), p);
      CHECK(std::get<RandomForest>(forest.payload).trees[0] == std::get<DecisionTree>(tree.payload));
    }
  }

  TEST_CASE("forest is deterministic for any worker count") {
    const auto ds = testing::threshold_dataset(80, 16, 7, 30.0, 5);
    ModelParams p;
    p.seed = 42;
    p.jobs = 1;
    const auto a = serialize_model(train_forest(ds, p));
    CHECK(serialize_model(train_forest(ds, p)) == a);
    p.jobs = 4;
    CHECK(serialize_model(train_forest(ds, p)) == a);
    p.seed = 43;
    CHECK(serialize_model(train_forest(ds, p)) != a);
  }

  TEST_CASE("even vote split goes to phish") {
    TrainedModel m;
    m.feature_names = {"x"};
    m.kinds = {FeatureKind::numeric};
    RandomForest f;
    for (int i = 0; i < 30; ++i) {
      DecisionTree t;
      TreeNode leaf;
      leaf.counts = i < 15 ? std::array<std::uint32_t, 2>{0, 3} : std::array<std::uint32_t, 2>{3, 0};
      t.nodes.push_back(leaf);
      f.trees.push_back(t);
    }
    m.payload = f;
    const auto p = predict(m, std::vector<double>{0.0});
    CHECK(p.score == 0.5);
    CHECK(p.label == Label::phish);
    m.params.ties_to_phish = false;
    CHECK(predict(m, std::vector<double>{0.0}).label == Label::ham);
  }

  TEST_CASE("trees are scale invariant") {
    const auto ds = testing::threshold_dataset(60, 4, 0, 30.0, 77);
    auto scaled = ds;
    for (auto& row : scaled.rows) {
      for (auto& v : row.values) v *= 8.0;
    }
    for (const auto a : {Algorithm::tree, Algorithm::forest}) {
      auto p = params_for(a);
      const auto m1 = train(ds, p);
      const auto m2 = train(scaled, p);
      auto probes = testing::threshold_dataset(40, 4, 0, 30.0, 78);
      for (const auto& row : probes.rows) {
        auto big = row.values;
        for (auto& v : big) v *= 8.0;
        CHECK(predict(m1, std::span<const double>(row.values)).label ==
              predict(m2, std::span<const double>(big)).label);
      }
    }
  }

  TEST_CASE("scores stay in range") {
    const auto ds = testing::threshold_dataset(50, 5, 1, 50.0, 9);
    for (const auto a : {Algorithm::naive_bayes, Algorithm::tree, Algorithm::forest}) {
      const auto m = train(ds, params_for(a));
      for (const auto& row : ds.rows) {
        const auto p = predict(m, std::span<const double>(row.values));
        CHECK(p.score >= 0.0);
        CHECK(p.score <= 1.0);
        CHECK((p.label == Label::phish) == (p.score >= 0.5));
      }
    }
  }

  TEST_CASE("arity is checked at prediction") {
    const auto m = train_tree(xor_dataset(), {});
    CHECK(code_of([&] { predict(m, std::vector<double>{1.0}); }) == ErrorCode::ArityMismatch);
  }

  TEST_CASE("parameter validation") {
    ModelParams p;
    p.trees = 0;
    CHECK(code_of([&] { p.validate(16); }) == ErrorCode::InvalidArgument);
    p = {};
    p.features_per_split = 17;
    CHECK(code_of([&] { p.validate(16); }) == ErrorCode::InvalidArgument);
    p = {};
    p.min_leaf = 0;
    CHECK(code_of([&] { p.validate(16); }) == ErrorCode::InvalidArgument);
    CHECK(parse_algorithm("naive_bayes") == Algorithm::naive_bayes);
    CHECK(code_of([] { parse_algorithm("svm"); }) == ErrorCode::InvalidArgument);
  }
}
