#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trisieve/dataset.hpp"
#include "trisieve/model.hpp"
#include "trisieve/optimizer.hpp"

namespace trisieve {

struct FitOptions {
  /// Parametric fits: one two-step warm start plus (n_starts - 1) jittered
  /// copies.
  int n_starts = 5;
  /// Sieve fits: the two warm starts plus this many starts whose sieve
  /// coefficients are drawn N(0, sieve_start_scale^2) around the warm psi.
  int sieve_random_starts = 4;
  double sieve_start_scale = 2.0;
  /// Standard deviation of start jitter relative to |parameter| (absolute
  /// when the parameter is zero).
  double jitter_scale = 0.25;
  std::uint64_t seed = 20240101;
  OptimizerOptions optimizer;
  /// When set, a single optimization starts here (free-vector coordinates).
  std::optional<Eigen::VectorXd> start;
};

struct FitResult {
  ParameterMap map;
  Theta theta_hat;
  Eigen::VectorXd free_hat;
  double loglik_value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  int start_points_used = 0;
  int starts_converged = 0;
  std::string normalization_record;
  std::vector<std::string> warnings;

  const ModelSpec& spec() const { return map.spec(); }
};

/// Parametric ML. Throws DataError for a degenerate dataset (y or d
/// constant); a warning is recorded when no instrument column varies.
FitResult fit_parametric(const Dataset& data, const ModelSpec& spec, const FitOptions& options = {},
                         const Eigen::VectorXd* weights = nullptr);

/// Sieve ML over (psi, a_eps, a_nu) with a_0 = 1. Starts from the psi block
/// of a parametric fit with location-scale normal marginals (computed when
/// `warm` is null), with h = 1, with h projected from that fit and with
/// random sieve coefficients.
FitResult fit_sieve(const Dataset& data, const ModelSpec& spec, const FitOptions& options = {},
                    const FitResult* warm = nullptr, const Eigen::VectorXd* weights = nullptr);

/// Dispatches on spec.is_sieve().
FitResult fit_model(const Dataset& data, const ModelSpec& spec, const FitOptions& options = {},
                    const Eigen::VectorXd* weights = nullptr);

/// Single optimization from `start` (free coordinates of `map`).
FitResult fit_from(const Dataset& data, const ParameterMap& map, const Eigen::VectorXd& start,
                   const OptimizerOptions& options = {}, const Eigen::VectorXd* weights = nullptr);

/// Conditional ATE F_eps(x'beta + beta0 + delta1) - F_eps(x'beta + beta0).
double ate(const ModelSpec& spec, const Theta& theta, const Eigen::VectorXd& x);

/// Spearman rho implied by the fitted dependence parameter.
double fitted_spearman(const FitResult& fit);

/// Same model with location-scale marginals on G = Phi in place of sieve
/// marginals (the parametric counterpart used for warm starts).
ModelSpec parametric_counterpart(const ModelSpec& sieve_spec);

/// Sieve coefficients (a_0 = 1) whose density h best matches, in L2 on
/// [0,1], the density of U = G(e) when e follows the location-scale law.
Eigen::VectorXd project_to_sieve(const TransformG& g, const MarginalSpec& location_scale,
                                 const MarginalParams& params, int order);

}  // namespace trisieve
