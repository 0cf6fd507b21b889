#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trisieve/copula.hpp"
#include "trisieve/dataset.hpp"
#include "trisieve/estimator.hpp"
#include "trisieve/inference.hpp"
#include "trisieve/marginals.hpp"
#include "trisieve/model.hpp"

namespace trisieve {

/// Data-generating process
///   D = 1{x'alpha + z'gamma >= nu},  Y = 1{x'beta + D delta1 >= eps}
/// with (x, z) jointly normal (unit variances, given correlation) and
/// (eps, nu) = (F_eps^{-1}(U1), F_nu^{-1}(U2)), (U1, U2) ~ C(.;rho).
struct Dgp {
  CopulaFamily copula = CopulaFamily::Gaussian;
  double rho_sp = 0.5;
  bool comonotone = false;  // U2 = U1 exactly; rho_sp is ignored
  ParametricMarginal eps = ParametricMarginal::normal();
  ParametricMarginal nu = ParametricMarginal::normal();
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  Eigen::VectorXd gamma;
  double delta1 = 1.1;
  /// Correlation matrix of (x_1..x_k, z_1..z_l).
  Eigen::MatrixXd covariate_corr;

  Eigen::Index kx() const { return alpha.size(); }
  Eigen::Index kz() const { return gamma.size(); }
  /// Native copula parameter matching rho_sp.
  DependenceParam dependence() const;
  double true_ate(const Eigen::VectorXd& x) const;
  void validate() const;
  std::string describe() const;
};

/// One fitted model of a scenario. Sieve orders follow `order_policy`.
struct FittedModel {
  std::string label;
  CopulaFamily copula = CopulaFamily::Gaussian;
  bool sieve = false;
  TransformG g;
  SieveOrderPolicy order_policy;
  Normalization normalization;

  ModelSpec spec_for(std::size_t n) const;
};

struct Scenario {
  std::string id;
  std::string description;
  std::size_t n = 500;
  int replications = 200;
  std::uint64_t seed = 1;
  Dgp dgp;
  std::vector<FittedModel> models;
  /// ATE evaluation point; empty means the covariate mean (zero).
  Eigen::VectorXd ate_x;
  FitOptions fit;
  int threads = 0;

  Eigen::VectorXd ate_point() const;
  void validate() const;
};

/// Draws replication `rep` of the scenario from the stream (seed, rep).
Dataset simulate_dataset(const Dgp& dgp, std::size_t n, std::uint64_t seed, std::uint64_t rep);
Dataset simulate_dataset(const Scenario& scenario, std::uint64_t rep);
/// Same draw, also returning the latent (eps, nu) columns.
Dataset simulate_dataset(const Dgp& dgp, std::size_t n, std::uint64_t seed, std::uint64_t rep,
                         Eigen::MatrixXd* latent);

struct McCell {
  std::string model;
  std::string target;
  double truth = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  int replications = 0;
};

struct McSummary {
  std::string scenario_id;
  std::vector<std::string> models;
  std::vector<std::string> targets;  // gamma, delta1, rho_sp, ATE
  std::vector<McCell> cells;         // model-major
  /// estimates[m](r, t): replication r for model m; rows of failed replications excluded.
  std::vector<Eigen::MatrixXd> estimates;
  std::vector<int> replication_index;
  int failures = 0;
  int replications = 0;
  std::vector<int> sieve_orders;  // per model, 0 for parametric

  const McCell& cell(const std::string& model, const std::string& target) const;
};

/// Population summary of one column: mean, SD with divisor R, bias, RMSE.
McCell summarize_column(const std::vector<double>& values, double truth);

/// Simulates and fits every replication (parallel over replications) and
/// aggregates in replication order. A replication fails when any of its
/// fits throws or ends unconverged; throws NumericalError when more than 5%
/// fail.
McSummary run_monte_carlo(const Scenario& scenario);

/// Bootstrap coverage of one parametric model.
struct CoverageStudy {
  std::string id;
  Scenario scenario;       // uses scenario.models.front()
  int bootstrap_draws = 200;
  double level = 0.95;
  BootstrapWeights weights = BootstrapWeights::Exponential;
};

struct CoverageRow {
  std::string target;
  double truth = 0.0;
  double normal_coverage = 0.0;
  double percentile_coverage = 0.0;
  double mean_se = 0.0;
  double mc_sd = 0.0;
};

struct CoverageSummary {
  std::string id;
  int simulations = 0;
  int failures = 0;
  int bootstrap_draws = 0;
  double level = 0.95;
  std::vector<CoverageRow> rows;
  const CoverageRow& row(const std::string& target) const;
};

/// Targets reported by the coverage design: ATE at the evaluation point,
/// every free alpha and beta, the first gamma, delta1 and rho.
std::vector<Target> coverage_targets(const Scenario& scenario, const ParameterMap& map);
std::vector<double> coverage_truths(const Scenario& scenario, const std::vector<Target>& targets);

CoverageSummary run_coverage_study(const CoverageStudy& study);

/// Named designs; see preset_names(). Throws std::invalid_argument for an
/// unknown name.
Scenario make_preset(const std::string& name);
std::vector<std::string> preset_names();
CoverageStudy make_coverage_preset(const std::string& name);
std::vector<std::string> coverage_preset_names();

}  // namespace trisieve
