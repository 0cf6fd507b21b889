#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace trisieve {

enum class TransformKind { StandardNormal, StudentT3, Logistic };

/// Fixed strictly increasing map from the real line onto (0,1).
class TransformG {
 public:
  TransformG() = default;
  explicit TransformG(TransformKind kind) : kind_(kind) {}

  TransformKind kind() const { return kind_; }
  double cdf(double x) const;
  double pdf(double x) const;
  double quantile(double u) const;
  std::string name() const;

 private:
  TransformKind kind_ = TransformKind::StandardNormal;
};

/// Accepts normal, t3, logistic.
TransformG parse_transform(std::string_view name);

/// Distribution laws used to generate data and as parametric fits.
class ParametricMarginal {
 public:
  struct Normal {
    double mu = 0.0;
    double sigma = 1.0;
  };
  struct NormalMixture {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> sigmas;
    bool standardized = false;
  };
  struct StudentT {
    double df = 3.0;
  };

  static ParametricMarginal normal(double mu = 0.0, double sigma = 1.0);
  static ParametricMarginal mixture(std::vector<double> weights, std::vector<double> means,
                                    std::vector<double> sigmas, bool standardized);
  static ParametricMarginal student_t(double df);

  double pdf(double x) const;
  double cdf(double x) const;
  double quantile(double p) const;
  /// Mean and standard deviation of the stored law (after standardization).
  double mean() const;
  double sd() const;
  std::string describe() const;

  const std::variant<Normal, NormalMixture, StudentT>& law() const { return law_; }

 private:
  explicit ParametricMarginal(std::variant<Normal, NormalMixture, StudentT> law);
  double raw_mixture_cdf(double x) const;
  double raw_mixture_pdf(double x) const;

  std::variant<Normal, NormalMixture, StudentT> law_;
  // Raw mixture moments; the standardized law is (X - shift) / scale.
  double shift_ = 0.0;
  double scale_ = 1.0;
};

/// Sieve marginal F(x) = H(G(x)) with density h(u) = q(u)^2 / int_0^1 q^2 and
/// q(u) = sum_k a_k u^k on the raw polynomial basis.
class SieveMarginal {
 public:
  /// Coefficients are canonicalized by dividing by the first nonzero entry,
  /// so a and c*a describe the same marginal. Throws if all are zero.
  SieveMarginal(TransformG g, Eigen::VectorXd a);

  int order() const { return static_cast<int>(a_.size()) - 1; }
  const Eigen::VectorXd& coeffs() const { return a_; }
  const TransformG& transform() const { return g_; }

  double h(double u) const;
  double H(double u) const;
  /// H(u) and dH/da_m for every m (length order()+1).
  double H_with_grad(double u, double* grad) const;

  double pdf(double x) const { return h(g_.cdf(x)) * g_.pdf(x); }
  double cdf(double x) const { return H(g_.cdf(x)); }
  double quantile(double p) const;

 private:
  TransformG g_;
  Eigen::VectorXd a_;
  Eigen::VectorXd p_coef_;  // P(u) = sum_m p_coef_[m] u^(m+1), P(1) = norm_
  double norm_ = 1.0;
};

/// Inverse of a continuous increasing CDF by bracket expansion and bisection
/// to 1e-10 in x.
double bracketed_quantile(const std::function<double(double)>& cdf, double p);

/// Finds the component sigma of the standardized mixture
/// sum w_k N(m_k, sigma^2) such that F(delta1) - F(0) = target_ate within
/// 1e-5. The default components are 0.6 N(-1, s^2) + 0.4 N(1.5, s^2).
/// When every mean coincides the standardized law does not depend on sigma;
/// then sigma = 1 is returned provided the target matches. With
/// standardized = false the raw mixture itself is calibrated; the smallest
/// admissible sigma is returned since the raw ATE is not monotone in sigma.
ParametricMarginal calibrate_mixture(double target_ate, double delta1);
ParametricMarginal calibrate_mixture(double target_ate, double delta1,
                                     const std::vector<double>& weights,
                                     const std::vector<double>& means, bool standardized = true);

/// Rule for the sieve order k_n.
struct SieveOrderPolicy {
  enum class Kind { Proportional, TheoryRate, Fixed };
  Kind kind = Kind::Proportional;
  /// Proportional: k_n = round(c n^(1/7)) with c set so k_n = 2 at n = 500.
  double constant = 2.0 / std::pow(500.0, 1.0 / 7.0);
  /// TheoryRate: k_n = round(c n^(1/(2p+1))) with smoothness p.
  double smoothness = 3.0;
  int fixed_order = 2;

  int order_for(std::size_t n) const;
};

}  // namespace trisieve
