#include "covtweet/numopt.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "covtweet/errors.hpp"

namespace covtweet::numopt {

namespace {

struct Correction {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho = 0.0;  // 1 / (s . y)
};

void require_finite(double value, int iteration) {
  if (!std::isfinite(value)) {
    throw NumericError(
        "minimize_quasi_newton: non-finite objective value at iteration " +
        std::to_string(iteration));
  }
}

// Two-loop recursion; returns the descent direction -H g.
Eigen::VectorXd lbfgs_direction(const std::deque<Correction>& history,
                                const Eigen::VectorXd& grad) {
  Eigen::VectorXd q = -grad;
  if (history.empty()) return q;

  std::vector<double> alpha(history.size());
  for (std::size_t i = history.size(); i-- > 0;) {
    alpha[i] = history[i].rho * history[i].s.dot(q);
    q -= alpha[i] * history[i].y;
  }
  const Correction& last = history.back();
  const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
  q *= gamma;
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double beta = history[i].rho * history[i].y.dot(q);
    q += (alpha[i] - beta) * history[i].s;
  }
  return q;
}

}  // namespace

QuasiNewtonResult minimize_quasi_newton(const Objective& obj,
                                        const Eigen::VectorXd& x0,
                                        const QuasiNewtonConfig& cfg) {
  if (obj.dim != x0.size()) {
    throw NumericError("minimize_quasi_newton: x0 has size " +
                       std::to_string(x0.size()) + ", objective dim is " +
                       std::to_string(obj.dim));
  }
  if (cfg.memory < 1 || cfg.grad_tol <= 0.0) {
    throw NumericError(
        "minimize_quasi_newton: memory must be >= 1 and grad_tol > 0");
  }
  Eigen::VectorXd x = x0;
  Eigen::VectorXd grad(obj.dim);
  double value = obj.eval(x, grad);
  require_finite(value, 0);

  std::deque<Correction> history;
  Eigen::VectorXd x_new(obj.dim);
  Eigen::VectorXd grad_new(obj.dim);

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    if (grad.size() == 0 || grad.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) {
      break;
    }
    Eigen::VectorXd dir = lbfgs_direction(history, grad);
    double slope = grad.dot(dir);
    if (slope >= 0.0) {  // curvature info went stale
      dir = -grad;
      slope = grad.dot(dir);
      history.clear();
    }

    double step = history.empty()
                      ? std::min(1.0, 1.0 / grad.lpNorm<1>())
                      : 1.0;
    bool accepted = false;
    double value_new = value;
    for (int ev = 0; ev < cfg.line_search.max_evals &&
                     step >= cfg.line_search.min_step;
         ++ev) {
      x_new = x + step * dir;
      value_new = obj.eval(x_new, grad_new);
      require_finite(value_new, iter + 1);
      if (value_new <=
          value + cfg.line_search.sufficient_decrease * step * slope) {
        accepted = true;
        break;
      }
      step *= cfg.line_search.backtrack_factor;
    }
    if (!accepted) break;  // return the best point found so far

    Correction c;
    c.s = x_new - x;
    c.y = grad_new - grad;
    const double sy = c.s.dot(c.y);
    if (sy > 1e-10 * c.s.norm() * c.y.norm()) {
      c.rho = 1.0 / sy;
      history.push_back(std::move(c));
      if (static_cast<int>(history.size()) > cfg.memory) {
        history.pop_front();
      }
    }
    x.swap(x_new);
    grad.swap(grad_new);
    value = value_new;
  }
  return {std::move(x), value, iter};
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
               AdamState& state, const AdamConfig& cfg) {
  if (cfg.learning_rate <= 0.0 || cfg.epsilon <= 0.0 || cfg.beta1 <= 0.0 ||
      cfg.beta1 >= 1.0 || cfg.beta2 <= 0.0 || cfg.beta2 >= 1.0) {
    throw NumericError("adam_step: invalid optimizer constants");
  }
  if (params.size() != grad.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    throw NumericError(
        "adam_step: params/grad/state sizes disagree: " +
        std::to_string(params.size()) + "/" + std::to_string(grad.size()) +
        "/" + std::to_string(state.m.size()));
  }
  state.step += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v =
      cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double bc1 =
      1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 =
      1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  const Eigen::VectorXd m_hat = state.m / bc1;
  const Eigen::VectorXd v_hat = state.v / bc2;
  params.array() -= cfg.learning_rate * m_hat.array() /
                    (v_hat.array().sqrt() + cfg.epsilon);
}

}  // namespace covtweet::numopt
