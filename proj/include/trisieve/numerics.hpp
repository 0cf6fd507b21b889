#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trisieve {

/// Raised when an iterative numerical routine fails to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace numerics {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double norm_pdf(double x);
double norm_cdf(double x);
/// Inverse of norm_cdf on (0,1); returns -inf/+inf at 0/1.
double norm_quantile(double p);

/// P(X <= x, Y <= y) for a standard bivariate normal with correlation rho.
///
/// Genz (2004) hybrid scheme: Gauss-Legendre integration of the Plackett
/// representation for |rho| < 0.925 and of the Drezner-Wesolowsky
/// asymptotic remainder above it. Absolute error is below 1e-14 for
/// |rho| <= 1 - 1e-10 in double precision.
double bvn_cdf(double x, double y, double rho);
double bvn_pdf(double x, double y, double rho);

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule with n nodes, computed by Newton iteration on P_n.
const GaussLegendreRule& gauss_legendre(int n);

/// Integral of f over [a, b] with the n-node rule.
double integrate(const std::function<double(double)>& f, double a, double b, int n);

/// Composite n-node rule over `panels` equal sub-intervals of [a, b].
double integrate_composite(const std::function<double(double)>& f, double a, double b, int n,
                           int panels);

/// Pairwise (cascade) summation with a fixed split tree, so the result
/// depends only on the input order.
double pairwise_sum(std::span<const double> values);

/// Bisection on a monotone function with f(lo) and f(hi) of opposite signs.
/// Stops when the bracket width falls below tol.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol,
              int max_iter = 200);

/// Bracketing root finder (TOMS 748). Throws NumericalError when the
/// bracket does not contain a sign change.
double find_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                 int max_iter = 200);

}  // namespace numerics
}  // namespace trisieve
