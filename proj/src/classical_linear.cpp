#include <cmath>

#include "covtweet/classical.hpp"
#include "covtweet/errors.hpp"

namespace covtweet::classical {

namespace {

void check_training_set(const std::vector<SparseVector>& X,
                        const std::vector<Label>& y) {
  if (X.empty() || X.size() != y.size()) {
    throw DataError("linear fit: " + std::to_string(X.size()) +
                    " feature vectors for " + std::to_string(y.size()) +
                    " labels");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (const Label l : y) {
    (l == Label::Informative ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw DataError("linear fit: training labels are a single class");
  }
}

double sign_of(Label l) { return l == Label::Informative ? 1.0 : -1.0; }

// Objective over [w, b] with the data-term loss supplied per margin.
// loss(margin) must fill its derivative and return the loss value.
template <typename LossFn>
numopt::Objective linear_objective(const std::vector<SparseVector>& X,
                                   const std::vector<Label>& y, double C,
                                   Eigen::Index dim, LossFn loss) {
  numopt::Objective obj;
  obj.dim = dim + 1;
  obj.eval = [&X, &y, C, dim, loss](const Eigen::VectorXd& params,
                                    Eigen::VectorXd& grad) {
    const auto w = params.head(dim);
    const double b = params[dim];
    grad.setZero();
    double value = 0.5 * w.squaredNorm();
    grad.head(dim) = w;
    for (std::size_t i = 0; i < X.size(); ++i) {
      const SparseVector& x = X[i];
      double f = b;
      for (std::size_t k = 0; k < x.nnz(); ++k) {
        f += w[x.indices[k]] * x.values[k];
      }
      const double target = sign_of(y[i]);
      double dmargin = 0.0;
      value += C * loss(target * f, dmargin);
      const double coeff = C * dmargin * target;
      if (coeff != 0.0) {
        for (std::size_t k = 0; k < x.nnz(); ++k) {
          grad[x.indices[k]] += coeff * x.values[k];
        }
        grad[dim] += coeff;
      }
    }
    return value;
  };
  return obj;
}

LinearModelParams run_fit(const numopt::Objective& obj, Eigen::Index dim,
                          double C, const numopt::QuasiNewtonConfig& opt) {
  const auto result =
      numopt::minimize_quasi_newton(obj, Eigen::VectorXd::Zero(obj.dim), opt);
  LinearModelParams p;
  p.weights = result.x.head(dim);
  p.bias = result.x[dim];
  p.regularization_c = C;
  return p;
}

}  // namespace

double linear_decision(const SparseVector& x, const LinearModelParams& p) {
  double f = p.bias;
  for (std::size_t k = 0; k < x.nnz(); ++k) {
    f += p.weights[x.indices[k]] * x.values[k];
  }
  return f;
}

Label linear_predict(const SparseVector& x, const LinearModelParams& p) {
  return linear_decision(x, p) > 0.0 ? Label::Informative
                                     : Label::Uninformative;
}

numopt::Objective logreg_objective(const std::vector<SparseVector>& X,
                                   const std::vector<Label>& y, double C) {
  return linear_objective(
      X, y, C, X.at(0).dim, [](double margin, double& dmargin) {
        // log(1 + exp(-m)) evaluated stably on both tails
        if (margin > 0.0) {
          const double e = std::exp(-margin);
          dmargin = -e / (1.0 + e);
          return std::log1p(e);
        }
        const double e = std::exp(margin);
        dmargin = -1.0 / (1.0 + e);
        return -margin + std::log1p(e);
      });
}

numopt::Objective svm_objective(const std::vector<SparseVector>& X,
                                const std::vector<Label>& y, double C) {
  return linear_objective(
      X, y, C, X.at(0).dim, [](double margin, double& dmargin) {
        const double gap = 1.0 - margin;
        if (gap <= 0.0) {
          dmargin = 0.0;
          return 0.0;
        }
        dmargin = -2.0 * gap;
        return gap * gap;
      });
}

LinearModelParams logreg_fit(const std::vector<SparseVector>& X,
                             const std::vector<Label>& y, double C,
                             const numopt::QuasiNewtonConfig& opt) {
  check_training_set(X, y);
  return run_fit(logreg_objective(X, y, C), X[0].dim, C, opt);
}

LinearModelParams svm_fit(const std::vector<SparseVector>& X,
                          const std::vector<Label>& y, double C,
                          const numopt::QuasiNewtonConfig& opt) {
  check_training_set(X, y);
  return run_fit(svm_objective(X, y, C), X[0].dim, C, opt);
}

}  // namespace covtweet::classical
