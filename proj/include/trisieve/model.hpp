#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "trisieve/copula.hpp"
#include "trisieve/marginals.hpp"

namespace trisieve {

/// How a marginal enters the likelihood.
///   Fixed          F = G
///   LocationScale  F(x) = G((x - mu) / sigma), free (mu, log sigma)
///   Sieve          F(x) = H(G(x)), free a_1..a_k with a_0 = 1
enum class MarginalKind { Fixed, LocationScale, Sieve };

struct MarginalSpec {
  MarginalKind kind = MarginalKind::Fixed;
  TransformG base;
  int sieve_order = 0;

  static MarginalSpec fixed(TransformG g = TransformG()) { return {MarginalKind::Fixed, g, 0}; }
  static MarginalSpec location_scale(TransformG g = TransformG()) {
    return {MarginalKind::LocationScale, g, 0};
  }
  static MarginalSpec sieve(TransformG g, int order) { return {MarginalKind::Sieve, g, order}; }

  int free_count() const;
  std::string describe() const;
};

struct Normalization {
  enum class Scheme { MeanVarUnit, FixedCoefficient };
  Scheme scheme = Scheme::MeanVarUnit;
  /// (column index, value) pairs removed from the free parameters.
  std::vector<std::pair<int, double>> alpha_pinned;
  std::vector<std::pair<int, double>> beta_pinned;

  /// Intercepts free, marginals fixed at their standardized law.
  static Normalization mean_var_unit() { return {}; }
  /// No intercepts; the listed coefficients are pinned.
  static Normalization fixed_coefficient(std::vector<std::pair<int, double>> alpha_pins,
                                         std::vector<std::pair<int, double>> beta_pins);
  bool has_intercepts() const { return scheme == Scheme::MeanVarUnit; }
  std::string describe() const;
};

struct ModelSpec {
  CopulaFamily copula = CopulaFamily::Gaussian;
  MarginalSpec eps;
  MarginalSpec nu;
  Normalization normalization;

  bool is_sieve() const {
    return eps.kind == MarginalKind::Sieve || nu.kind == MarginalKind::Sieve;
  }
  /// Throws std::invalid_argument for combinations that are not identified:
  /// free location/scale or sieve marginals need FixedCoefficient with at
  /// least one pinned coefficient in the matching equation; pins must index
  /// existing columns.
  void validate(Eigen::Index kx, Eigen::Index kz) const;
  std::string describe() const;
};

struct MarginalParams {
  double mu = 0.0;
  double sigma = 1.0;
  Eigen::VectorXd a;  // sieve coefficients including a_0
};

/// Full parameter bundle on native scales.
struct Theta {
  Eigen::VectorXd alpha;  // kx
  Eigen::VectorXd beta;   // kx
  Eigen::VectorXd gamma;  // kz
  double alpha0 = 0.0;
  double beta0 = 0.0;
  double delta1 = 0.0;
  double rho = 0.0;
  MarginalParams eps;
  MarginalParams nu;
};

/// Role of a free parameter.
enum class ParamRole { Alpha0, Alpha, Beta0, Beta, Delta1, Gamma, Rho, EpsMu, EpsLogSigma, EpsSieve,
                       NuMu, NuLogSigma, NuSieve };

struct FreeParam {
  ParamRole role;
  int index;  // column index or sieve coefficient index
  std::string name;
};

/// Maps between Theta and the optimizer's free vector, laid out as
///   [alpha0][free alpha][beta0][free beta][delta1][gamma][rho_t][eta_eps][eta_nu]
/// The first psi_size() entries (through rho_t) form the psi block; the
/// rest are marginal nuisance parameters. rho_t is the unconstrained
/// dependence coordinate.
class ParameterMap {
 public:
  ParameterMap(ModelSpec spec, Eigen::Index kx, Eigen::Index kz,
               std::vector<std::string> x_names = {}, std::vector<std::string> z_names = {});

  const ModelSpec& spec() const { return spec_; }
  Eigen::Index kx() const { return kx_; }
  Eigen::Index kz() const { return kz_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(params_.size()); }
  Eigen::Index psi_size() const { return psi_size_; }
  Eigen::Index rho_index() const { return psi_size_ - 1; }
  Eigen::Index delta1_index() const { return delta1_index_; }
  Eigen::Index gamma_index(int j) const { return gamma_index_ + j; }
  const std::vector<FreeParam>& params() const { return params_; }
  std::vector<std::string> names() const;

  Theta unpack(const Eigen::VectorXd& free) const;
  Eigen::VectorXd pack(const Theta& theta) const;
  /// Theta with pins applied, independence copula, marginals at G and the
  /// remaining coefficients zero.
  Theta default_theta() const;

  Eigen::VectorXd lower_bounds() const;
  Eigen::VectorXd upper_bounds() const;

 private:
  ModelSpec spec_;
  Eigen::Index kx_;
  Eigen::Index kz_;
  std::vector<FreeParam> params_;
  Eigen::Index psi_size_ = 0;
  Eigen::Index delta1_index_ = 0;
  Eigen::Index gamma_index_ = 0;
};

/// Box bound used for all coefficients and marginal parameters.
inline constexpr double kCoefficientBound = 50.0;

/// Marginal CDF F, density f and dF/d(eta) for one equation under a given
/// parameter value.
class MarginalModel {
 public:
  MarginalModel(const MarginalSpec& spec, const MarginalParams& params);

  int free_count() const { return free_count_; }
  /// Writes dF/d(eta) into grad (length free_count()) when grad != nullptr.
  void eval(double x, double& F, double& f, double* grad) const;
  double cdf(double x) const;

 private:
  MarginalSpec spec_;
  double mu_ = 0.0;
  double sigma_ = 1.0;
  std::vector<SieveMarginal> sieve_;  // empty or one element
  int free_count_ = 0;
};

}  // namespace trisieve
