#include <cmath>

#include "covtweet/classical.hpp"
#include "covtweet/errors.hpp"

namespace covtweet::classical {

namespace {

int class_index(Label l) { return l == Label::Informative ? 0 : 1; }

}  // namespace

NaiveBayesParams nb_fit(const std::vector<SparseVector>& X,
                        const std::vector<Label>& y, double alpha) {
  if (X.empty() || X.size() != y.size()) {
    throw DataError("nb_fit: " + std::to_string(X.size()) +
                    " feature vectors for " + std::to_string(y.size()) +
                    " labels");
  }
  const Eigen::Index v = X[0].dim;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(2, v);
  std::array<double, 2> class_docs{0.0, 0.0};
  for (std::size_t i = 0; i < X.size(); ++i) {
    const int c = class_index(y[i]);
    class_docs[c] += 1.0;
    const SparseVector& x = X[i];
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      if (x.values[k] < 0.0) {
        throw DataError("nb_fit: negative feature value in document " +
                        std::to_string(i));
      }
      counts(c, x.indices[k]) += x.values[k];
    }
  }

  NaiveBayesParams p;
  p.smoothing_alpha = alpha;
  const double n = static_cast<double>(X.size());
  for (int c = 0; c < 2; ++c) {
    p.log_prior[c] = std::log(class_docs[c] / n);
  }
  p.log_likelihood.resize(2, v);
  for (int c = 0; c < 2; ++c) {
    const double total =
        counts.row(c).sum() + alpha * static_cast<double>(v);
    for (Eigen::Index t = 0; t < v; ++t) {
      p.log_likelihood(c, t) = std::log((counts(c, t) + alpha) / total);
    }
  }
  return p;
}

std::array<double, 2> nb_log_posterior(const SparseVector& x,
                                       const NaiveBayesParams& p) {
  std::array<double, 2> joint = p.log_prior;
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    if (x.values[k] < 0.0) {
      throw DataError("nb_log_posterior: negative feature value");
    }
    for (int c = 0; c < 2; ++c) {
      joint[c] += x.values[k] * p.log_likelihood(c, x.indices[k]);
    }
  }
  // normalize via log-sum-exp
  const double hi = std::max(joint[0], joint[1]);
  const double lse =
      hi + std::log(std::exp(joint[0] - hi) + std::exp(joint[1] - hi));
  return {joint[0] - lse, joint[1] - lse};
}

Label nb_predict(const SparseVector& x, const NaiveBayesParams& p) {
  const auto post = nb_log_posterior(x, p);
  return post[0] > post[1] ? Label::Informative : Label::Uninformative;
}

}  // namespace covtweet::classical
