#pragma once

#include <Eigen/Dense>

#include "trisieve/dataset.hpp"
#include "trisieve/model.hpp"

namespace trisieve {

/// Probability floor applied to every cell before renormalization.
inline constexpr double kProbFloor = 1e-12;

struct CellProbs {
  double p11 = 0.0;
  double p10 = 0.0;
  double p01 = 0.0;
  double p00 = 0.0;

  double get(int y, int d) const;
  double sum() const { return p11 + p10 + p01 + p00; }
};

/// p11 = C(r1,s), p10 = r0 - C(r0,s), p01 = s - C(r1,s),
/// p00 = 1 - r0 - s + C(r0,s); each floored at kProbFloor and renormalized.
CellProbs assemble_cells(double r0, double s, double c_r1s, double c_r0s);

/// Fitted cell probabilities at one covariate point.
CellProbs cell_probs(const ModelSpec& spec, const Theta& theta, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& z);

struct LoglikEval {
  double value = 0.0;
  Eigen::VectorXd grad;    // d value / d free, when requested
  Eigen::MatrixXd scores;  // n x p unweighted d log p_i / d free, when requested
};

/// (1/n) sum_i w_i log p_{y_i d_i}(x_i, z_i). The gradient is analytic and
/// uses the pre-floor derivative of the observed cell divided by its floored,
/// renormalized probability. Sums use pairwise reduction in row order.
/// Throws std::invalid_argument on nonpositive weights or shape mismatch.
LoglikEval evaluate_loglik(const ParameterMap& map, const Eigen::VectorXd& free, const Dataset& data,
                           const Eigen::VectorXd* weights, bool want_grad, bool want_scores);

double loglik(const ParameterMap& map, const Eigen::VectorXd& free, const Dataset& data,
              const Eigen::VectorXd* weights = nullptr);
Eigen::VectorXd loglik_grad(const ParameterMap& map, const Eigen::VectorXd& free, const Dataset& data,
                            const Eigen::VectorXd* weights = nullptr);

}  // namespace trisieve
