#include "covtweet/classical.hpp"
#include "covtweet/errors.hpp"

namespace covtweet::classical {

namespace {

constexpr const char* kMagic = "covtweet-model";
constexpr int kSchemaVersion = 1;

nlohmann::json envelope(const char* kind) {
  return nlohmann::json{
      {"magic", kMagic}, {"schema_version", kSchemaVersion}, {"kind", kind}};
}

void check_envelope(const nlohmann::json& j, const char* kind) {
  if (!j.is_object() || j.value("magic", "") != kMagic) {
    throw DataError("model file: missing magic string");
  }
  if (j.value("schema_version", 0) != kSchemaVersion) {
    throw DataError("model file: unsupported schema version");
  }
  if (j.value("kind", "") != kind) {
    throw DataError("model file: kind is \"" + j.value("kind", "") +
                    "\", expected \"" + kind + "\"");
  }
}

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vec_from_json(const nlohmann::json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

nlohmann::json to_json(const LinearModelParams& p) {
  auto j = envelope("linear");
  j["weights"] = vec_to_json(p.weights);
  j["bias"] = p.bias;
  j["regularization_c"] = p.regularization_c;
  return j;
}

LinearModelParams linear_from_json(const nlohmann::json& j) {
  check_envelope(j, "linear");
  LinearModelParams p;
  p.weights = vec_from_json(j.at("weights"));
  p.bias = j.at("bias").get<double>();
  p.regularization_c = j.at("regularization_c").get<double>();
  return p;
}

nlohmann::json to_json(const NaiveBayesParams& p) {
  auto j = envelope("naive_bayes");
  j["log_prior"] = p.log_prior;
  j["log_likelihood_informative"] =
      vec_to_json(p.log_likelihood.row(0).transpose());
  j["log_likelihood_uninformative"] =
      vec_to_json(p.log_likelihood.row(1).transpose());
  j["smoothing_alpha"] = p.smoothing_alpha;
  return j;
}

NaiveBayesParams nb_from_json(const nlohmann::json& j) {
  check_envelope(j, "naive_bayes");
  NaiveBayesParams p;
  p.log_prior = j.at("log_prior").get<std::array<double, 2>>();
  const Eigen::VectorXd row0 =
      vec_from_json(j.at("log_likelihood_informative"));
  const Eigen::VectorXd row1 =
      vec_from_json(j.at("log_likelihood_uninformative"));
  p.log_likelihood.resize(2, row0.size());
  p.log_likelihood.row(0) = row0.transpose();
  p.log_likelihood.row(1) = row1.transpose();
  p.smoothing_alpha = j.at("smoothing_alpha").get<double>();
  return p;
}

nlohmann::json to_json(const ForestParams& p) {
  auto j = envelope("forest");
  j["max_depth"] = p.max_depth;
  j["seed"] = p.seed;
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : p.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes) {
      nodes.push_back({n.feature, n.threshold, n.left, n.right,
                       n.leaf_dist[0], n.leaf_dist[1]});
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j;
}

ForestParams forest_from_json(const nlohmann::json& j) {
  check_envelope(j, "forest");
  ForestParams p;
  p.max_depth = j.at("max_depth").get<std::int32_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& tree_json : j.at("trees")) {
    Tree tree;
    for (const auto& n : tree_json) {
      TreeNode node;
      node.feature = n.at(0).get<std::int32_t>();
      node.threshold = n.at(1).get<double>();
      node.left = n.at(2).get<std::int32_t>();
      node.right = n.at(3).get<std::int32_t>();
      node.leaf_dist = {n.at(4).get<double>(), n.at(5).get<double>()};
      tree.nodes.push_back(node);
    }
    p.trees.push_back(std::move(tree));
  }
  return p;
}

nlohmann::json to_json(const MlpParams& p) {
  auto j = envelope("mlp");
  j["dim_in"] = p.w1.rows();
  j["l2_alpha"] = p.l2_alpha;
  j["flat"] = vec_to_json(p.flatten());
  return j;
}

MlpParams mlp_from_json(const nlohmann::json& j) {
  check_envelope(j, "mlp");
  return MlpParams::unflatten(vec_from_json(j.at("flat")),
                              j.at("dim_in").get<Eigen::Index>(),
                              j.at("l2_alpha").get<double>());
}

}  // namespace covtweet::classical
