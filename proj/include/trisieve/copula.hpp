#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trisieve {

class RngStream;

enum class CopulaFamily { Gaussian, Frank, Clayton, Gumbel };

std::string to_string(CopulaFamily family);
/// Accepts lower-case names: gaussian, frank, clayton, gumbel.
CopulaFamily parse_copula_family(std::string_view name);
inline constexpr std::array<CopulaFamily, 4> kAllCopulaFamilies = {
    CopulaFamily::Gaussian, CopulaFamily::Frank, CopulaFamily::Clayton, CopulaFamily::Gumbel};

/// Dependence parameter on the family's native scale.
///
/// Admissible domains: Gaussian (-1,1); Frank any finite value with 0 as the
/// independence limit; Clayton [0,inf) with 0 as the limit; Gumbel [1,inf).
class DependenceParam {
 public:
  DependenceParam(CopulaFamily family, double rho);

  CopulaFamily family() const { return family_; }
  double rho() const { return rho_; }
  bool is_independence() const;

  static DependenceParam independence(CopulaFamily family);

 private:
  CopulaFamily family_;
  double rho_;
};

struct CopulaPartials {
  double c1 = 0.0;    // dC/du1
  double c2 = 0.0;    // dC/du2
  double crho = 0.0;  // dC/drho on the native scale
};

/// Value and first derivatives in one pass; shares the transcendental work.
struct CopulaValues {
  double c = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double crho = 0.0;
};

namespace copula {

double cdf(const DependenceParam& p, double u1, double u2);
double comonotone_cdf(double u1, double u2);

/// Throws std::domain_error unless u1, u2 lie strictly inside (0,1).
CopulaPartials partials(const DependenceParam& p, double u1, double u2);
CopulaValues evaluate(const DependenceParam& p, double u1, double u2);

/// Copula density d^2C/du1du2 on the open unit square.
double density(const DependenceParam& p, double u1, double u2);

/// dC/du1 (the conditional CDF of U2 given U1 = u1).
double conditional_cdf(const DependenceParam& p, double u1, double u2);
/// Solves conditional_cdf(p, u1, u2) = w for u2 by Newton steps safeguarded
/// by a bisection bracket on (0,1); tolerance 1e-10.
double conditional_inverse(const DependenceParam& p, double u1, double w);

/// 12 * int int C - 3 using a 64-node Gauss-Legendre tensor rule.
double spearman_rho(const DependenceParam& p);
/// Inverse of spearman_rho. Throws std::domain_error when rho_sp is outside
/// the range the family can reach (negative values for Clayton and Gumbel).
DependenceParam from_spearman(CopulaFamily family, double rho_sp);

struct SiViolation {
  double u1;
  double u2;
  double rho;
  double crho;
};

struct SiReport {
  CopulaFamily family;
  std::size_t points_checked = 0;
  double min_crho = 0.0;
  std::vector<SiViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks Crho > 0 at every (u1, u2, rho) of the tensor grid.
SiReport si_ordering_scan(CopulaFamily family, const std::vector<double>& rho_grid,
                          const std::vector<double>& u_grid);

std::vector<std::array<double, 2>> sample(const DependenceParam& p, std::size_t n,
                                          std::uint64_t seed);
std::vector<std::array<double, 2>> sample(const DependenceParam& p, std::size_t n,
                                          RngStream& stream);
std::vector<std::array<double, 2>> sample_comonotone(std::size_t n, std::uint64_t seed);

/// Smooth bijection between an unconstrained scalar t and the interior of
/// the family's domain, used by the optimizer:
///   Gaussian rho = (1 - 1e-6) tanh(t)
///   Frank    theta = t
///   Clayton  theta = 1e-6 + exp(t)
///   Gumbel   theta = 1 + 1e-6 + exp(t)
double native_from_unconstrained(CopulaFamily family, double t);
double unconstrained_from_native(CopulaFamily family, double rho);
double dnative_dunconstrained(CopulaFamily family, double t);
/// Box for t that keeps the native value in a numerically safe range.
std::pair<double, double> unconstrained_bounds(CopulaFamily family);

}  // namespace copula
}  // namespace trisieve
