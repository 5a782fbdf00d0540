#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>

namespace covtweet::numopt {

// Differentiable function of a flat parameter vector. eval fills `grad`
// (resized by the caller to dim) and returns the value.
struct Objective {
  Eigen::Index dim = 0;
  std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)> eval;
};

struct LineSearchConfig {
  double sufficient_decrease = 1e-4;  // Armijo c1
  double backtrack_factor = 0.5;
  double min_step = 1e-20;
  int max_evals = 60;
};

struct QuasiNewtonConfig {
  int memory = 10;
  int max_iters = 200;
  double grad_tol = 1e-5;  // infinity norm
  LineSearchConfig line_search;
};

struct QuasiNewtonResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
};

// Limited-memory BFGS with backtracking line search. Returns once
// ||grad||_inf <= grad_tol, after max_iters, or when no decreasing step
// exists; the returned value never exceeds the value at x0. Throws
// NumericError if the objective turns non-finite.
QuasiNewtonResult minimize_quasi_newton(const Objective& obj,
                                        const Eigen::VectorXd& x0,
                                        const QuasiNewtonConfig& cfg = {});

struct AdamConfig {
  double learning_rate = 2e-5;
  double epsilon = 1e-8;
  double beta1 = 0.9;
  double beta2 = 0.999;
};

struct AdamState {
  std::int64_t step = 0;
  Eigen::VectorXd m;  // first moment
  Eigen::VectorXd v;  // second moment

  explicit AdamState(Eigen::Index dim)
      : m(Eigen::VectorXd::Zero(dim)), v(Eigen::VectorXd::Zero(dim)) {}
};

// One bias-corrected adaptive-moment update, in place.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
               AdamState& state, const AdamConfig& cfg);

}  // namespace covtweet::numopt
