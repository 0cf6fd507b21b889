#pragma once

#include <functional>

#include <Eigen/Dense>

namespace trisieve {

struct OptimizerOptions {
  /// Convergence when the sup-norm of the projected gradient falls below this.
  double tol_g = 1e-6;
  int max_iter = 500;
  /// Largest allowed sup-norm of a single search direction.
  double max_step = 5.0;
};

struct OptimizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd grad;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double grad_norm = 0.0;
};

/// Objective returning f(x) and, when grad != nullptr, its gradient.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

/// Maximizes f over the box [lower, upper] by BFGS with a projected
/// backtracking (Armijo) line search. Coordinates with lower == upper stay
/// fixed. Non-finite objective values are treated as failed trial steps.
OptimizerResult maximize_bfgs(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                              const Eigen::VectorXd& upper, const OptimizerOptions& options = {});

/// Sup-norm of the gradient after zeroing components that push against an
/// active bound (ascent direction).
double projected_grad_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

}  // namespace trisieve
