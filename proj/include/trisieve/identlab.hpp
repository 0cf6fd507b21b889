#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "trisieve/copula.hpp"
#include "trisieve/likelihood.hpp"

namespace trisieve {

/// Dependence used by the identification demos: a family member or the
/// comonotone copula min(u, v).
struct DemoDependence {
  CopulaFamily family = CopulaFamily::Gaussian;
  double rho = 0.0;
  bool comonotone = false;

  double cdf(double u, double v) const;
};

/// One parameter set of the binary-covariate model in probability
/// coordinates with uniform margins: r0 = t_x, r1 = t_x + delta1, s = q_x
/// for x in {0, 1}.
struct BinaryParameterSet {
  double t0 = 0.0;
  double t1 = 0.0;
  double q0 = 0.0;
  double q1 = 0.0;
  double delta1 = 0.0;
  DemoDependence dependence;

  void validate() const;
  CellProbs cells(int x) const;
};

struct BinaryCounterexample {
  BinaryParameterSet a;
  BinaryParameterSet b;

  /// The pair from the no-instrument failure: A with independence and B
  /// with the comonotone copula.
  static BinaryCounterexample paper();
};

struct CounterexampleReport {
  /// cells[x][set] with set 0 = A, 1 = B.
  std::array<std::array<CellProbs, 2>, 2> cells;
  double max_discrepancy = 0.0;
};

CounterexampleReport verify_binary_counterexample(const BinaryCounterexample& example);

/// t*(x) = q + (1 - q) t and s(x) = q t for the continuous-covariate case
/// with rho = 0 and rho* = 1.
double failure_t_star(double q, double t);
double failure_s_dagger(double q, double t);

struct FailureOptions {
  /// Covariate grid: `grid_points` equally spaced points on [-grid_half_width, grid_half_width].
  int grid_points = 201;
  double grid_half_width = 4.0;
  /// Knots of the quantile perturbation E on the normal scale.
  int knots = 281;
  double knot_half_width = 7.0;
  double smoothness = 0.01;
  double ridge = 1.0;
  double delta_penalty = 1e-8;
  double damping = 0.5;
  double tolerance = 1e-6;
  int max_iter = 200;
};

struct FailureDistribution {
  double delta1_star = 0.0;
  double residual = 0.0;
  std::vector<double> residual_history;  // one entry per iteration, starting at the initial guess
  int iterations = 0;
  bool converged = false;
  /// Tabulated F~ on the knots: y_k = z_k + E(z_k), F~(y_k) = Phi(z_k).
  std::vector<double> y;
  std::vector<double> F;
  /// sup |F~ - Phi| over [-3, 3].
  double sup_deviation = 0.0;
  bool strictly_increasing = false;

  double cdf(double v) const;
};

/// Solves for a strictly increasing F~ and constant delta1* with
///   F~^{-1}(q t) - F~^{-1}(q + (1 - q) t) = delta1*
/// at every grid point. F~^{-1}(u) = Phi^{-1}(u) + E(Phi^{-1}(u)) with E
/// piecewise linear on the knots. The constraint is linear in (E, delta1*);
/// each iteration adds `damping` times the minimum-norm correction of the
/// current residual under a curvature-plus-ridge metric, so the residual
/// shrinks by a fixed factor per step. Throws NumericalError when the
/// tolerance is not reached in max_iter steps.
FailureDistribution solve_failure_distribution(const std::function<double(double)>& q_of_x,
                                               const std::function<double(double)>& t_of_x,
                                               const FailureOptions& options = {});

/// Default index functions q = t = Phi.
FailureDistribution solve_failure_distribution(const FailureOptions& options = {});

/// Lemma-style positivity check of dC/drho; forwards to copula::si_ordering_scan.
copula::SiReport positivity_scan(CopulaFamily family, const std::vector<double>& rho_grid,
                         const std::vector<double>& u_grid);

/// Interior grids used by the CLI and acceptance checks: `points` values
/// (k + 1) / (points + 1) and a symmetric admissible rho grid per family.
std::vector<double> interior_unit_grid(int points);
std::vector<double> default_rho_grid(CopulaFamily family, int count);

}  // namespace trisieve
