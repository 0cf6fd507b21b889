#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trisieve/dataset.hpp"
#include "trisieve/estimator.hpp"

namespace trisieve {

/// Efficient-score information for the psi block. Scores for rho are on the
/// native scale of the copula parameter.
struct EfficientScoreFit {
  std::vector<std::string> names;  // psi-block names
  /// Column k holds the regression coefficients of the psi_k score on the
  /// nuisance scores (eps block first, then nu).
  Eigen::MatrixXd b;
  Eigen::MatrixXd I_star_hat;
  Eigen::MatrixXd covariance;  // I_star_hat^{-1} / n
  Eigen::VectorXd se;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  /// max_{k,j} |<residual_k, nuisance_j>| / n after the projection.
  double max_orthogonality = 0.0;
  Eigen::Index nuisance_dim = 0;
};

/// Projects each psi score on the span of the marginal-parameter scores by
/// least squares and forms I* = R'R / n from the residuals R. Throws
/// NumericalError when I* is not positive definite (message carries the
/// smallest eigenvalue).
EfficientScoreFit efficient_score_variance(const FitResult& fit, const Dataset& data);

/// Derivative of the conditional ATE with respect to the free vector of the
/// fit's parameter map. The marginal block carries the integral of the
/// perturbation of h_eps between G(x'b) and G(x'b + delta1).
Eigen::VectorXd ate_gradient(const ParameterMap& map, const Eigen::VectorXd& free,
                             const Eigen::VectorXd& x);

/// Directional derivative of the ATE along v (free coordinates).
double ate_directional_derivative(const ParameterMap& map, const Eigen::VectorXd& free,
                                  const Eigen::VectorXd& x, const Eigen::VectorXd& v);

struct AteVariance {
  double ate = 0.0;
  /// sup_v (dATE[v])^2 / (v' I v) with I the per-observation score outer
  /// product over the full free vector; the asymptotic variance of sqrt(n)(ATE_hat - ATE).
  double sigma2 = 0.0;
  double se = 0.0;  // sqrt(sigma2 / n)
  Eigen::VectorXd maximizer;  // direction attaining the supremum, unit I-norm
};

AteVariance ate_variance(const FitResult& fit, const Dataset& data, const Eigen::VectorXd& x);

/// Scalar functionals reported by bootstraps and Monte Carlo runs.
struct Target {
  enum class Kind { Alpha, Beta, Gamma, Delta1, Rho, RhoSpearman, Ate };
  Kind kind = Kind::Delta1;
  int index = 0;       // column for Alpha/Beta/Gamma
  Eigen::VectorXd x;   // evaluation point for Ate
  std::string name;

  static Target alpha(int j, std::string name);
  static Target beta(int j, std::string name);
  static Target gamma(int j, std::string name);
  static Target delta1();
  static Target rho();
  static Target rho_spearman();
  static Target ate(Eigen::VectorXd x);
};

double target_value(const Target& target, const FitResult& fit);

enum class BootstrapWeights { Exponential, LogNormal, Unit };

struct BootstrapOptions {
  int B = 200;
  std::uint64_t seed = 1;
  BootstrapWeights weights = BootstrapWeights::Exponential;
  std::vector<double> levels{0.95};
  /// The run throws NumericalError when more than this share of refits fails.
  double max_fail_share = 0.10;
  int threads = 0;
  OptimizerOptions optimizer;
};

struct Interval {
  double level = 0.95;
  double lower = 0.0;
  double upper = 0.0;
  bool contains(double v) const { return lower <= v && v <= upper; }
};

struct BootstrapResult {
  std::vector<Target> targets;
  Eigen::VectorXd point;       // targets at the original fit
  Eigen::MatrixXd estimates;   // successful draws x targets, in draw order
  std::vector<int> draw_index; // b of each stored row
  int B = 0;
  int failures = 0;
  Eigen::VectorXd se;
  /// pci[t][l]: percentile interval for target t at levels[l].
  std::vector<std::vector<Interval>> pci;
  /// point +- z * se, for comparison.
  std::vector<std::vector<Interval>> normal_ci;
};

/// Weight vector for draw b: i.i.d. Exp(1), log-normal with mean and
/// variance 1, or all ones, from the stream (seed, b).
Eigen::VectorXd bootstrap_weights(BootstrapWeights scheme, Eigen::Index n, std::uint64_t seed,
                                  std::uint64_t b);

/// Maximizes the weighted log-likelihood once per draw, starting from the
/// point estimate, and summarizes the targets. SE uses the 1/B formula;
/// percentile bounds are the order statistics ceil(tau * B) for tau = p/2
/// and 1 - p/2.
BootstrapResult weighted_bootstrap(const Dataset& data, const FitResult& fit,
                                   const std::vector<Target>& targets, const BootstrapOptions& options);

/// Nearest order statistic: the ceil(tau * m)-th smallest of m values, with
/// the rank clamped to [1, m].
double order_statistic(std::vector<double> values, double tau);

}  // namespace trisieve
