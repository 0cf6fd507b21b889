#include "trisieve/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "trisieve/numerics.hpp"
#include "trisieve/rng.hpp"

namespace trisieve {

namespace {

constexpr double kBijectionGap = 1e-6;

// Below these magnitudes the closed-form dC/dtheta cancels badly and the
// Taylor series in theta is used instead.
constexpr double kFrankSeriesCut = 1e-3;
constexpr double kClaytonSeriesCut = 1e-4;

std::string family_name(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::Gaussian:
      return "gaussian";
    case CopulaFamily::Frank:
      return "frank";
    case CopulaFamily::Clayton:
      return "clayton";
    case CopulaFamily::Gumbel:
      return "gumbel";
  }
  return "unknown";
}

void check_unit(double u, const char* what) {
  if (std::isnan(u) || u < 0.0 || u > 1.0) {
    throw std::domain_error(std::string("copula: ") + what + " outside [0,1]");
  }
}

void check_interior(double u, const char* what) {
  if (std::isnan(u) || !(u > 0.0 && u < 1.0)) {
    throw std::domain_error(std::string("copula: ") + what + " must lie in (0,1)");
  }
}

// Clayton log S with S = u^-theta + v^-theta - 1, a = -theta ln u, b = -theta ln v.
double clayton_log_s(double a, double b) {
  const double m = std::max(a, b);
  if (m < 1.0) {
    return std::log1p(std::expm1(a) + std::expm1(b));
  }
  const double lo = std::min(a, b);
  return m + std::log1p(std::exp(lo - m) - std::exp(-m));
}

CopulaValues gaussian_values(double u, double v, double rho) {
  const double x1 = numerics::norm_quantile(u);
  const double x2 = numerics::norm_quantile(v);
  const double om = std::sqrt((1.0 - rho) * (1.0 + rho));
  CopulaValues out;
  out.c = numerics::bvn_cdf(x1, x2, rho);
  out.c1 = numerics::norm_cdf((x2 - rho * x1) / om);
  out.c2 = numerics::norm_cdf((x1 - rho * x2) / om);
  out.crho = numerics::bvn_pdf(x1, x2, rho);
  return out;
}

double frank_theta_series(double u, double v, double t) {
  const double uv = u * v;
  const double um = u - 1.0;
  const double vm = v - 1.0;
  const double u2 = 2.0 * u - 1.0;
  const double v2 = 2.0 * v - 1.0;
  const double c1 = uv * um * vm / 2.0;
  const double c2 = uv * um * u2 * vm * v2 / 12.0;
  const double q3 = 6.0 * u * u * v * v - 6.0 * u * u * v + u * u - 6.0 * u * v * v + 6.0 * u * v - u +
                    v * v - v;
  const double c3 = uv * um * vm * q3 / 24.0;
  const double q4 = 36.0 * u * u * v * v - 36.0 * u * u * v + 3.0 * u * u - 36.0 * u * v * v +
                    36.0 * u * v - 3.0 * u + 3.0 * v * v - 3.0 * v - 1.0;
  const double c4 = uv * um * u2 * vm * v2 * q4 / 720.0;
  return c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * 4.0 * c4));
}

CopulaValues frank_values(double u, double v, double t) {
  CopulaValues out;
  if (t == 0.0) {
    out.c = u * v;
    out.c1 = v;
    out.c2 = u;
    out.crho = frank_theta_series(u, v, 0.0);
    return out;
  }
  const double eu = std::exp(-t * u);
  const double ev = std::exp(-t * v);
  const double a = std::expm1(-t * u);
  const double b = std::expm1(-t * v);
  const double d = std::expm1(-t);
  const double den = d + a * b;
  const double l = std::log1p(a * b / d);
  out.c = -l / t;
  out.c1 = eu * b / den;
  out.c2 = ev * a / den;
  if (std::abs(t) < kFrankSeriesCut) {
    out.crho = frank_theta_series(u, v, t);
  } else {
    const double at = -u * eu;
    const double bt = -v * ev;
    const double dt = -std::exp(-t);
    out.crho = l / (t * t) - ((dt + at * b + a * bt) / den - dt / d) / t;
  }
  return out;
}

CopulaValues clayton_values(double u, double v, double t) {
  CopulaValues out;
  const double x = -std::log(u);
  const double y = -std::log(v);
  if (t == 0.0) {
    out.c = u * v;
    out.c1 = v;
    out.c2 = u;
    out.crho = u * v * x * y;
    return out;
  }
  const double a = t * x;
  const double b = t * y;
  const double ls = clayton_log_s(a, b);
  out.c = std::exp(-ls / t);
  out.c1 = out.c / u * std::exp(a - ls);
  out.c2 = out.c / v * std::exp(b - ls);
  if (t < kClaytonSeriesCut && t * std::max(x, y) < 1e-2) {
    const double xy = x * y;
    out.crho = out.c * xy * (1.0 - t * (x + y) + t * t * (2.0 * x * x + 9.0 * xy + 2.0 * y * y) / 4.0);
  } else {
    const double st = x * std::exp(a - ls) + y * std::exp(b - ls);
    out.crho = out.c * (ls / (t * t) - st / t);
  }
  return out;
}

struct GumbelCore {
  double x, y, log_a, a, c, l1, r, rt;
};

GumbelCore gumbel_core(double u, double v, double t) {
  GumbelCore g{};
  g.x = -std::log(u);
  g.y = -std::log(v);
  const double m = std::max(g.x, g.y);
  g.r = std::min(g.x, g.y) / m;
  g.rt = std::pow(g.r, t);
  g.l1 = std::log1p(g.rt);
  g.log_a = std::log(m) + g.l1 / t;
  g.a = std::exp(g.log_a);
  g.c = std::exp(-g.a);
  return g;
}

CopulaValues gumbel_values(double u, double v, double t) {
  const GumbelCore g = gumbel_core(u, v, t);
  CopulaValues out;
  out.c = g.c;
  out.c1 = g.c / u * std::exp((1.0 - t) * g.log_a + (t - 1.0) * std::log(g.x));
  out.c2 = g.c / v * std::exp((1.0 - t) * g.log_a + (t - 1.0) * std::log(g.y));
  const double tail = g.r > 0.0 ? g.rt * std::log(g.r) / (1.0 + g.rt) : 0.0;
  const double dlog_a = -g.l1 / (t * t) + tail / t;
  out.crho = -g.c * g.a * dlog_a;
  return out;
}

CopulaValues interior_values(CopulaFamily f, double u, double v, double rho) {
  switch (f) {
    case CopulaFamily::Gaussian:
      return gaussian_values(u, v, rho);
    case CopulaFamily::Frank:
      return frank_values(u, v, rho);
    case CopulaFamily::Clayton:
      return clayton_values(u, v, rho);
    case CopulaFamily::Gumbel:
      return gumbel_values(u, v, rho);
  }
  return {};
}

double interior_cdf(CopulaFamily f, double u, double v, double rho) {
  switch (f) {
    case CopulaFamily::Gaussian:
      return numerics::bvn_cdf(numerics::norm_quantile(u), numerics::norm_quantile(v), rho);
    case CopulaFamily::Frank:
      if (rho == 0.0) {
        return u * v;
      }
      return -std::log1p(std::expm1(-rho * u) * std::expm1(-rho * v) / std::expm1(-rho)) / rho;
    case CopulaFamily::Clayton:
      if (rho == 0.0) {
        return u * v;
      }
      return std::exp(-clayton_log_s(-rho * std::log(u), -rho * std::log(v)) / rho);
    case CopulaFamily::Gumbel:
      return gumbel_core(u, v, rho).c;
  }
  return 0.0;
}

double interior_c1(CopulaFamily f, double u, double v, double rho) {
  switch (f) {
    case CopulaFamily::Gaussian: {
      const double om = std::sqrt((1.0 - rho) * (1.0 + rho));
      return numerics::norm_cdf((numerics::norm_quantile(v) - rho * numerics::norm_quantile(u)) / om);
    }
    case CopulaFamily::Frank: {
      if (rho == 0.0) {
        return v;
      }
      const double a = std::expm1(-rho * u);
      const double b = std::expm1(-rho * v);
      return std::exp(-rho * u) * b / (std::expm1(-rho) + a * b);
    }
    case CopulaFamily::Clayton:
    case CopulaFamily::Gumbel:
      return interior_values(f, u, v, rho).c1;
  }
  return 0.0;
}

// Copula density; only the conditional-inverse sampler needs it.
double interior_density(CopulaFamily f, double u, double v, double rho) {
  switch (f) {
    case CopulaFamily::Gaussian: {
      const double x1 = numerics::norm_quantile(u);
      const double x2 = numerics::norm_quantile(v);
      return numerics::bvn_pdf(x1, x2, rho) / (numerics::norm_pdf(x1) * numerics::norm_pdf(x2));
    }
    case CopulaFamily::Frank: {
      if (rho == 0.0) {
        return 1.0;
      }
      const double d = std::expm1(-rho);
      const double den = d + std::expm1(-rho * u) * std::expm1(-rho * v);
      return -rho * d * std::exp(-rho * (u + v)) / (den * den);
    }
    case CopulaFamily::Clayton: {
      if (rho == 0.0) {
        return 1.0;
      }
      const double x = -std::log(u);
      const double y = -std::log(v);
      const double ls = clayton_log_s(rho * x, rho * y);
      return std::exp(std::log1p(rho) + (rho + 1.0) * (x + y) - (1.0 / rho + 2.0) * ls);
    }
    case CopulaFamily::Gumbel: {
      const GumbelCore g = gumbel_core(u, v, rho);
      const double log_w = rho * g.log_a;
      const double log_c = -g.a + g.x + g.y + (rho - 1.0) * (std::log(g.x) + std::log(g.y)) +
                           (1.0 / rho - 2.0) * log_w + std::log(g.a + rho - 1.0);
      return std::exp(log_c);
    }
  }
  return 0.0;
}

}  // namespace

std::string to_string(CopulaFamily family) { return family_name(family); }

CopulaFamily parse_copula_family(std::string_view name) {
  for (CopulaFamily f : kAllCopulaFamilies) {
    if (family_name(f) == name) {
      return f;
    }
  }
  throw std::invalid_argument("unknown copula family '" + std::string(name) + "'");
}

DependenceParam::DependenceParam(CopulaFamily family, double rho) : family_(family), rho_(rho) {
  if (!std::isfinite(rho)) {
    throw std::domain_error("dependence parameter must be finite");
  }
  switch (family) {
    case CopulaFamily::Gaussian:
      if (!(rho > -1.0 && rho < 1.0)) {
        throw std::domain_error("gaussian copula requires rho in (-1,1)");
      }
      break;
    case CopulaFamily::Frank:
      break;
    case CopulaFamily::Clayton:
      if (rho < 0.0) {
        throw std::domain_error("clayton copula requires theta >= 0");
      }
      break;
    case CopulaFamily::Gumbel:
      if (rho < 1.0) {
        throw std::domain_error("gumbel copula requires theta >= 1");
      }
      break;
  }
}

bool DependenceParam::is_independence() const {
  return family_ == CopulaFamily::Gumbel ? rho_ == 1.0 : rho_ == 0.0;
}

DependenceParam DependenceParam::independence(CopulaFamily family) {
  return {family, family == CopulaFamily::Gumbel ? 1.0 : 0.0};
}

namespace copula {

double cdf(const DependenceParam& p, double u1, double u2) {
  check_unit(u1, "u1");
  check_unit(u2, "u2");
  if (u1 == 0.0 || u2 == 0.0) {
    return 0.0;
  }
  if (u1 == 1.0) {
    return u2;
  }
  if (u2 == 1.0) {
    return u1;
  }
  return std::clamp(interior_cdf(p.family(), u1, u2, p.rho()), 0.0, std::min(u1, u2));
}

double comonotone_cdf(double u1, double u2) {
  check_unit(u1, "u1");
  check_unit(u2, "u2");
  return std::min(u1, u2);
}

CopulaValues evaluate(const DependenceParam& p, double u1, double u2) {
  check_interior(u1, "u1");
  check_interior(u2, "u2");
  CopulaValues out = interior_values(p.family(), u1, u2, p.rho());
  out.c = std::clamp(out.c, 0.0, std::min(u1, u2));
  return out;
}

CopulaPartials partials(const DependenceParam& p, double u1, double u2) {
  const CopulaValues v = evaluate(p, u1, u2);
  return {v.c1, v.c2, v.crho};
}

double conditional_cdf(const DependenceParam& p, double u1, double u2) {
  check_interior(u1, "u1");
  check_unit(u2, "u2");
  if (u2 == 0.0) {
    return 0.0;
  }
  if (u2 == 1.0) {
    return 1.0;
  }
  return std::clamp(interior_c1(p.family(), u1, u2, p.rho()), 0.0, 1.0);
}

double density(const DependenceParam& p, double u1, double u2) {
  check_interior(u1, "u1");
  check_interior(u2, "u2");
  return interior_density(p.family(), u1, u2, p.rho());
}

double conditional_inverse(const DependenceParam& p, double u1, double w) {
  check_interior(u1, "u1");
  check_interior(w, "w");
  constexpr double kTol = 1e-10;
  double lo = 0.0;
  double hi = 1.0;
  double x = std::clamp(w, 1e-12, 1.0 - 1e-12);
  double last = 2.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double f = interior_c1(p.family(), u1, x, p.rho()) - w;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    if (f == 0.0) {
      return x;
    }
    const double dens = interior_density(p.family(), u1, x, p.rho());
    double next = x - f / dens;
    // Bisect when Newton leaves the bracket or stops halving the residual.
    if (!std::isfinite(next) || !(next > lo && next < hi) || std::abs(f) > 0.5 * last) {
      next = 0.5 * (lo + hi);
    }
    last = std::abs(f);
    if (std::abs(next - x) < kTol || hi - lo < kTol) {
      return next;
    }
    x = next;
  }
  throw NumericalError("conditional_inverse: no convergence");
}

double spearman_rho(const DependenceParam& p) {
  const auto& rule = numerics::gauss_legendre(64);
  const std::size_t m = rule.nodes.size();
  std::vector<double> u(m);
  std::vector<double> w(m);
  for (std::size_t i = 0; i < m; ++i) {
    u[i] = 0.5 * (1.0 + rule.nodes[i]);
    w[i] = 0.5 * rule.weights[i];
  }
  std::vector<double> rows(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      s += w[j] * cdf(p, u[i], u[j]);
    }
    rows[i] = w[i] * s;
  }
  return 12.0 * numerics::pairwise_sum(rows) - 3.0;
}

DependenceParam from_spearman(CopulaFamily family, double rho_sp) {
  if (!(rho_sp > -1.0 && rho_sp < 1.0)) {
    throw std::domain_error("spearman rho must lie in (-1,1)");
  }
  double lo = 0.0;
  double hi = 0.0;
  switch (family) {
    case CopulaFamily::Gaussian:
      lo = -0.9999;
      hi = 0.9999;
      break;
    case CopulaFamily::Frank:
      lo = -100.0;
      hi = 100.0;
      break;
    case CopulaFamily::Clayton:
    case CopulaFamily::Gumbel:
      if (rho_sp < 0.0) {
        throw std::domain_error(to_string(family) + " copula cannot reach negative spearman rho");
      }
      lo = family == CopulaFamily::Clayton ? 0.0 : 1.0;
      hi = 100.0;
      break;
  }
  if (rho_sp == 0.0) {
    return DependenceParam::independence(family);
  }
  auto f = [&](double r) { return spearman_rho(DependenceParam(family, r)) - rho_sp; };
  const double flo = f(lo);
  const double fhi = f(hi);
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw std::domain_error("spearman rho " + std::to_string(rho_sp) + " not reachable by " +
                            to_string(family) + " copula");
  }
  return {family, numerics::find_root(f, lo, hi, 1e-13)};
}

SiReport si_ordering_scan(CopulaFamily family, const std::vector<double>& rho_grid,
                          const std::vector<double>& u_grid) {
  SiReport report;
  report.family = family;
  report.min_crho = std::numeric_limits<double>::infinity();
  for (double rho : rho_grid) {
    const DependenceParam p(family, rho);
    for (double u1 : u_grid) {
      for (double u2 : u_grid) {
        const double crho = partials(p, u1, u2).crho;
        ++report.points_checked;
        report.min_crho = std::min(report.min_crho, crho);
        if (!(crho > 0.0)) {
          report.violations.push_back({u1, u2, rho, crho});
        }
      }
    }
  }
  return report;
}

std::vector<std::array<double, 2>> sample(const DependenceParam& p, std::size_t n,
                                          RngStream& stream) {
  if (n < 1) {
    throw std::invalid_argument("sample: n must be at least 1");
  }
  std::vector<std::array<double, 2>> out(n);
  for (auto& row : out) {
    const double u1 = stream.uniform();
    const double w = stream.uniform();
    row = {u1, conditional_inverse(p, u1, w)};
  }
  return out;
}

std::vector<std::array<double, 2>> sample(const DependenceParam& p, std::size_t n,
                                          std::uint64_t seed) {
  RngStream stream(seed);
  return sample(p, n, stream);
}

std::vector<std::array<double, 2>> sample_comonotone(std::size_t n, std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("sample: n must be at least 1");
  }
  RngStream stream(seed);
  std::vector<std::array<double, 2>> out(n);
  for (auto& row : out) {
    const double u = stream.uniform();
    row = {u, u};
  }
  return out;
}

double native_from_unconstrained(CopulaFamily family, double t) {
  switch (family) {
    case CopulaFamily::Gaussian:
      return (1.0 - kBijectionGap) * std::tanh(t);
    case CopulaFamily::Frank:
      return t;
    case CopulaFamily::Clayton:
      return kBijectionGap + std::exp(t);
    case CopulaFamily::Gumbel:
      return 1.0 + kBijectionGap + std::exp(t);
  }
  return 0.0;
}

double unconstrained_from_native(CopulaFamily family, double rho) {
  const auto [lo, hi] = unconstrained_bounds(family);
  double t = 0.0;
  switch (family) {
    case CopulaFamily::Gaussian:
      t = std::atanh(std::clamp(rho / (1.0 - kBijectionGap), -1.0 + 1e-15, 1.0 - 1e-15));
      break;
    case CopulaFamily::Frank:
      t = rho;
      break;
    case CopulaFamily::Clayton:
      t = rho - kBijectionGap > 0.0 ? std::log(rho - kBijectionGap) : lo;
      break;
    case CopulaFamily::Gumbel:
      t = rho - 1.0 - kBijectionGap > 0.0 ? std::log(rho - 1.0 - kBijectionGap) : lo;
      break;
  }
  return std::clamp(t, lo, hi);
}

double dnative_dunconstrained(CopulaFamily family, double t) {
  switch (family) {
    case CopulaFamily::Gaussian: {
      const double th = std::tanh(t);
      return (1.0 - kBijectionGap) * (1.0 - th * th);
    }
    case CopulaFamily::Frank:
      return 1.0;
    case CopulaFamily::Clayton:
    case CopulaFamily::Gumbel:
      return std::exp(t);
  }
  return 0.0;
}

std::pair<double, double> unconstrained_bounds(CopulaFamily family) {
  switch (family) {
    case CopulaFamily::Gaussian:
      return {-10.0, 10.0};
    case CopulaFamily::Frank:
      return {-50.0, 50.0};
    case CopulaFamily::Clayton:
      return {-30.0, std::log(50.0)};
    case CopulaFamily::Gumbel:
      return {-30.0, std::log(49.0)};
  }
  return {0.0, 0.0};
}

}  // namespace copula
}  // namespace trisieve
