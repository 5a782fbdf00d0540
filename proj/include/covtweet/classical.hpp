#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "covtweet/corpus.hpp"
#include "covtweet/features.hpp"
#include "covtweet/numopt.hpp"

namespace covtweet::classical {

using corpus::Label;
using features::SparseVector;

// ---------------------------------------------------------------- linear --

struct LinearModelParams {
  Eigen::VectorXd weights;  // dim = feature space
  double bias = 0.0;
  double regularization_c = 1.0;
};

// w.x + b; INFORMATIVE is encoded +1.
double linear_decision(const SparseVector& x, const LinearModelParams& p);
Label linear_predict(const SparseVector& x, const LinearModelParams& p);

// The fitting objectives over the flat [w, b] vector, exposed so gradient
// checks can probe them directly.
numopt::Objective logreg_objective(const std::vector<SparseVector>& X,
                                   const std::vector<Label>& y, double C);
numopt::Objective svm_objective(const std::vector<SparseVector>& X,
                                const std::vector<Label>& y, double C);

// min_w 0.5 ||w||^2 + C sum_i log(1 + exp(-y_i (w.x_i + b))), bias
// unregularized, solved with the shared quasi-Newton minimizer.
LinearModelParams logreg_fit(const std::vector<SparseVector>& X,
                             const std::vector<Label>& y, double C = 1.0,
                             const numopt::QuasiNewtonConfig& opt = {});

// Same shape with the squared hinge: C sum_i max(0, 1 - y_i f_i)^2.
LinearModelParams svm_fit(const std::vector<SparseVector>& X,
                          const std::vector<Label>& y, double C = 1.0,
                          const numopt::QuasiNewtonConfig& opt = {});

// ----------------------------------------------------------- naive bayes --

// Class index 0 = INFORMATIVE, 1 = UNINFORMATIVE throughout.
struct NaiveBayesParams {
  std::array<double, 2> log_prior{};
  Eigen::MatrixXd log_likelihood;  // 2 x V
  double smoothing_alpha = 1.0;
};

// Multinomial NB with Laplace smoothing over non-negative count features.
NaiveBayesParams nb_fit(const std::vector<SparseVector>& X,
                        const std::vector<Label>& y, double alpha = 1.0);

// Normalized log posteriors; exp() sums to 1.
std::array<double, 2> nb_log_posterior(const SparseVector& x,
                                       const NaiveBayesParams& p);
Label nb_predict(const SparseVector& x, const NaiveBayesParams& p);

// ---------------------------------------------------------------- forest --

struct TreeNode {
  std::int32_t feature = -1;  // -1 for leaves
  double threshold = 0.0;     // go left when value <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::array<double, 2> leaf_dist{};  // class proportions, sums to 1
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestParams {
  std::vector<Tree> trees;
  std::int32_t max_depth = 8;
  std::uint64_t seed = 0;
};

// Bootstrap-sampled trees, Gini splits over sqrt(V)-sized random feature
// subsets, depth capped at max_depth. Deterministic for a fixed seed.
ForestParams forest_fit(const std::vector<SparseVector>& X,
                        const std::vector<Label>& y, int n_trees = 100,
                        int max_depth = 8, std::uint64_t seed = 0);

std::array<int, 2> forest_votes(const SparseVector& x, const ForestParams& p);
// Majority of tree votes; ties go to UNINFORMATIVE.
Label forest_predict(const SparseVector& x, const ForestParams& p);

// ------------------------------------------------------------------- mlp --

// input -> 5 -> 2 -> 1 rectifier network with a logistic output unit.
struct MlpParams {
  Eigen::MatrixXd w1;  // V x 5
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // 5 x 2
  Eigen::VectorXd b2;
  Eigen::MatrixXd w3;  // 2 x 1
  Eigen::VectorXd b3;
  double l2_alpha = 1e-5;

  Eigen::VectorXd flatten() const;
  static MlpParams unflatten(const Eigen::VectorXd& flat, Eigen::Index dim_in,
                             double alpha);
  static Eigen::Index flat_size(Eigen::Index dim_in);
};

// Mean binary cross-entropy plus alpha/(2n) * sum of squared weights
// (biases unpenalized), as a flat-vector objective for the quasi-Newton
// solver and for finite-difference checks.
numopt::Objective mlp_objective(const std::vector<SparseVector>& X,
                                const std::vector<Label>& y, double alpha,
                                Eigen::Index dim_in);

MlpParams mlp_fit(const std::vector<SparseVector>& X,
                  const std::vector<Label>& y, double alpha = 1e-5,
                  std::uint64_t seed = 0,
                  const numopt::QuasiNewtonConfig& opt = {});

// P(INFORMATIVE | x).
double mlp_decision(const SparseVector& x, const MlpParams& p);
Label mlp_predict(const SparseVector& x, const MlpParams& p);

// --------------------------------------------------------- serialization --

// Self-describing JSON documents with a magic string and schema version.
nlohmann::json to_json(const LinearModelParams& p);
nlohmann::json to_json(const NaiveBayesParams& p);
nlohmann::json to_json(const ForestParams& p);
nlohmann::json to_json(const MlpParams& p);
LinearModelParams linear_from_json(const nlohmann::json& j);
NaiveBayesParams nb_from_json(const nlohmann::json& j);
ForestParams forest_from_json(const nlohmann::json& j);
MlpParams mlp_from_json(const nlohmann::json& j);

}  // namespace covtweet::classical
