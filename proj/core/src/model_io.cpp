#include <fstream>
#include <sstream>

#include "json.hpp"

#include "phishkd/classify.hpp"
#include "phishkd/error.hpp"

namespace phishkd {
namespace {

using nlohmann::json;

FeatureKind kind_from(const std::string& text) {
  if (text == "binary") return FeatureKind::binary;
  if (text == "numeric") return FeatureKind::numeric;
  throw Error(ErrorCode::CorruptModel, "unknown feature kind '" + text + "'");
}

json params_to_json(const ModelParams& p) {
  return json{{"algorithm", std::string(to_string(p.algorithm))},
              {"trees", p.trees},
              {"features_per_split", p.features_per_split},
              {"min_leaf", p.min_leaf},
              {"laplace_alpha", p.laplace_alpha},
              {"variance_floor", p.variance_floor},
              {"seed", p.seed},
              {"ties_to_phish", p.ties_to_phish}};
}

ModelParams params_from_json(const json& j) {
  ModelParams p;
  p.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  p.trees = j.at("trees").get<std::size_t>();
  p.features_per_split = j.at("features_per_split").get<std::size_t>();
  p.min_leaf = j.at("min_leaf").get<std::size_t>();
  p.laplace_alpha = j.at("laplace_alpha").get<double>();
  p.variance_floor = j.at("variance_floor").get<double>();
  p.seed = j.at("seed").get<std::uint64_t>();
  p.ties_to_phish = j.at("ties_to_phish").get<bool>();
  return p;
}

json tree_to_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) {
      nodes.push_back(json{{"counts", n.counts}});
    } else {
      nodes.push_back(json{{"counts", n.counts},
                           {"feature", n.feature},
                           {"threshold", n.threshold},
                           {"left", n.left},
                           {"right", n.right}});
    }
  }
  return json{{"nodes", std::move(nodes)}};
}

DecisionTree tree_from_json(const json& j, std::size_t arity) {
  DecisionTree tree;
  const auto& nodes = j.at("nodes");
  if (!nodes.is_array() || nodes.empty()) throw Error(ErrorCode::CorruptModel, "tree without nodes");
  const auto count = static_cast<std::int32_t>(nodes.size());
  for (std::int32_t i = 0; i < count; ++i) {
    const auto& jn = nodes[static_cast<std::size_t>(i)];
    TreeNode n;
    n.counts = jn.at("counts").get<std::array<std::uint32_t, 2>>();
    if (jn.contains("feature")) {
      n.feature = jn.at("feature").get<std::int32_t>();
      n.threshold = jn.at("threshold").get<double>();
      n.left = jn.at("left").get<std::int32_t>();
      n.right = jn.at("right").get<std::int32_t>();
      // Children always follow their parent, so this also rules out cycles.
      if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= arity || n.left <= i ||
          n.right <= i || n.left >= count || n.right >= count) {
        throw Error(ErrorCode::CorruptModel, "tree node " + std::to_string(i) + " is inconsistent");
      }
    } else if (n.counts[0] + n.counts[1] == 0) {
      throw Error(ErrorCode::CorruptModel, "empty leaf " + std::to_string(i));
    }
    tree.nodes.push_back(n);
  }
  return tree;
}

json nb_to_json(const NaiveBayesModel& nb) {
  json features = json::array();
  for (const auto& f : nb.features) {
    features.push_back(json{{"kind", std::string(to_string(f.kind))},
                            {"ignored", f.ignored},
                            {"p_one", f.p_one},
                            {"mean", f.mean},
                            {"variance", f.variance}});
  }
  return json{{"class_counts", nb.class_counts}, {"priors", nb.priors}, {"features", std::move(features)}};
}

NaiveBayesModel nb_from_json(const json& j, std::size_t arity) {
  NaiveBayesModel nb;
  nb.class_counts = j.at("class_counts").get<std::array<std::size_t, 2>>();
  nb.priors = j.at("priors").get<std::array<double, 2>>();
  for (const auto& jf : j.at("features")) {
    NaiveBayesModel::FeatureStats f;
    f.kind = kind_from(jf.at("kind").get<std::string>());
    f.ignored = jf.at("ignored").get<bool>();
    f.p_one = jf.at("p_one").get<std::array<double, 2>>();
    f.mean = jf.at("mean").get<std::array<double, 2>>();
    f.variance = jf.at("variance").get<std::array<double, 2>>();
    nb.features.push_back(f);
  }
  if (nb.features.size() != arity) throw Error(ErrorCode::CorruptModel, "feature statistics do not match schema");
  return nb;
}

}  // namespace

std::string serialize_model(const TrainedModel& model) {
  json j;
  j["format_version"] = model.format_version;
  j["params"] = params_to_json(model.params);
  j["feature_names"] = model.feature_names;
  json kinds = json::array();
  for (const auto k : model.kinds) kinds.push_back(std::string(to_string(k)));
  j["feature_kinds"] = std::move(kinds);
  j["metadata"] = model.metadata;
  if (const auto* nb = std::get_if<NaiveBayesModel>(&model.payload)) {
    j["naive_bayes"] = nb_to_json(*nb);
  } else if (const auto* tree = std::get_if<DecisionTree>(&model.payload)) {
    j["tree"] = tree_to_json(*tree);
  } else {
    json trees = json::array();
    for (const auto& t : std::get<RandomForest>(model.payload).trees) trees.push_back(tree_to_json(t));
    j["forest"] = json{{"trees", std::move(trees)}};
  }
  return j.dump(2) + "\n";
}

TrainedModel deserialize_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("model is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version") || !j["format_version"].is_number_integer()) {
    throw Error(ErrorCode::CorruptModel, "model has no format_version");
  }
  const int version = j["format_version"].get<int>();
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, "model format_version " + std::to_string(version) +
                                                " is not supported (expected " +
                                                std::to_string(kModelFormatVersion) + ")");
  }
  try {
    TrainedModel m;
    m.format_version = version;
    m.params = params_from_json(j.at("params"));
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    for (const auto& k : j.at("feature_kinds")) m.kinds.push_back(kind_from(k.get<std::string>()));
    if (m.kinds.size() != m.feature_names.size() || m.feature_names.empty()) {
      throw Error(ErrorCode::CorruptModel, "feature schema is inconsistent");
    }
    if (j.contains("metadata")) m.metadata = j["metadata"].get<std::map<std::string, std::string>>();
    const std::size_t arity = m.feature_names.size();
    switch (m.params.algorithm) {
      case Algorithm::naive_bayes:
        m.payload = nb_from_json(j.at("naive_bayes"), arity);
        break;
      case Algorithm::tree:
        m.payload = tree_from_json(j.at("tree"), arity);
        break;
      case Algorithm::forest: {
        RandomForest forest;
        for (const auto& t : j.at("forest").at("trees")) forest.trees.push_back(tree_from_json(t, arity));
        if (forest.trees.empty()) throw Error(ErrorCode::CorruptModel, "forest without trees");
        m.payload = std::move(forest);
        break;
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptModel, std::string("malformed model: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::CorruptModel, e.what());
    throw;
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << serialize_model(model);
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::PathNotFound, "cannot open model " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_model(buf.str());
}

}  // namespace phishkd
