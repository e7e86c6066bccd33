#include "doctest.h"
#include "helpers.hpp"
#include "phishkd/classify.hpp"
#include "phishkd/error.hpp"

#include "json.hpp"

using namespace phishkd;

namespace {

ErrorCode load_error(const std::string& text) {
  try {
    deserialize_model(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("model_io") {
  TEST_CASE("round-trip keeps predictions and bytes") {
    const auto ds = testing::threshold_dataset(80, 16, 4, 30.0, 21);
    const auto probe = testing::threshold_dataset(100, 16, 4, 30.0, 22);
    for (const auto a : {Algorithm::naive_bayes, Algorithm::tree, Algorithm::forest}) {
      ModelParams p;
      p.algorithm = a;
      auto model = train(ds, p);
      model.metadata["hex_mode"] = "either";
      const auto text = serialize_model(model);
      const auto back = deserialize_model(text);
      CHECK(serialize_model(back) == text);
      CHECK(back.metadata == model.metadata);
      for (const auto& row : probe.rows) {
        const auto x = predict(model, std::span<const double>(row.values));
        const auto y = predict(back, std::span<const double>(row.values));
        CHECK(x.label == y.label);
        CHECK(x.score == y.score);
      }
    }
  }

  TEST_CASE("save and load through a file") {
    testing::TempDir dir;
    const auto model = train_tree(testing::threshold_dataset(30, 3, 0, 20.0, 1), {});
    save_model(model, dir / "m.json");
    CHECK(serialize_model(load_model(dir / "m.json")) == serialize_model(model));
    CHECK_THROWS_AS(load_model(dir / "missing.json"), Error);
  }

  TEST_CASE("unknown format version") {
    auto j = nlohmann::json::parse(serialize_model(train_tree(testing::threshold_dataset(10, 2, 0, 5.0, 3), {})));
    j["format_version"] = 999;
    CHECK(load_error(j.dump()) == ErrorCode::VersionMismatch);
  }

  TEST_CASE("corrupt models") {
    const auto text = serialize_model(train_tree(testing::threshold_dataset(20, 2, 0, 5.0, 3), {}));
    CHECK(load_error("not json") == ErrorCode::CorruptModel);
    CHECK(load_error("{}") == ErrorCode::CorruptModel);
    auto j = nlohmann::json::parse(text);
    j["tree"]["nodes"][0]["feature"] = 7;
    CHECK(load_error(j.dump()) == ErrorCode::CorruptModel);
    j = nlohmann::json::parse(text);
    j["params"]["algorithm"] = "svm";
    CHECK(load_error(j.dump()) == ErrorCode::CorruptModel);
    j = nlohmann::json::parse(text);
    j.erase("feature_names");
    CHECK(load_error(j.dump()) == ErrorCode::CorruptModel);
  }
}
