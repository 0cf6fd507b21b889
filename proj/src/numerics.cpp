#include "trisieve/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>

namespace trisieve::numerics {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kSqrt2Pi = 2.50662827463100050242;

GaussLegendreRule compute_gauss_legendre(int n) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess followed by Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        break;
      }
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    rule.nodes[n / 2] = 0.0;
  }
  return rule;
}

template <int N>
double gl_sum(const GaussLegendreRule& rule, auto&& f) {
  double s = 0.0;
  for (int i = 0; i < N; ++i) {
    s += rule.weights[i] * f(rule.nodes[i]);
  }
  return s;
}

}  // namespace

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("norm_quantile: probability outside [0,1]");
  }
  if (p == 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  if (p == 1.0) {
    return std::numeric_limits<double>::infinity();
  }
  return -kSqrt2 * boost::math::erfc_inv(2.0 * p);
}

double bvn_pdf(double x, double y, double rho) {
  const double om = 1.0 - rho * rho;
  const double q = (x * x - 2.0 * rho * x * y + y * y) / om;
  return std::exp(-0.5 * q) / (kTwoPi * std::sqrt(om));
}

double bvn_cdf(double x, double y, double rho) {
  if (std::isinf(x) || std::isinf(y)) {
    if (x == -std::numeric_limits<double>::infinity() ||
        y == -std::numeric_limits<double>::infinity()) {
      return 0.0;
    }
    if (std::isinf(x)) {
      return norm_cdf(y);
    }
    return norm_cdf(x);
  }

  const double r = rho;
  double h = -x;
  double k = -y;
  double hk = h * k;
  double bvn = 0.0;

  const GaussLegendreRule* rule;
  int order;
  if (std::abs(r) < 0.3) {
    rule = &gauss_legendre(6);
    order = 6;
  } else if (std::abs(r) < 0.75) {
    rule = &gauss_legendre(12);
    order = 12;
  } else {
    rule = &gauss_legendre(20);
    order = 20;
  }
  auto sum_rule = [&](auto&& f) {
    switch (order) {
      case 6:
        return gl_sum<6>(*rule, f);
      case 12:
        return gl_sum<12>(*rule, f);
      default:
        return gl_sum<20>(*rule, f);
    }
  };

  if (std::abs(r) < 0.925) {
    if (r != 0.0) {
      const double hs = 0.5 * (h * h + k * k);
      const double asr = std::asin(r);
      const double integral = sum_rule([&](double t) {
        const double sn = std::sin(asr * (1.0 - t) * 0.5);
        return std::exp((sn * hk - hs) / (1.0 - sn * sn));
      });
      bvn = integral * asr * (0.25 / kPi);
    }
    bvn += norm_cdf(-h) * norm_cdf(-k);
    return std::clamp(bvn, 0.0, 1.0);
  }

  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  if (std::abs(r) < 1.0) {
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    const double asr = -(bs / as + hk) / 2.0;
    if (asr > -100.0) {
      bvn = a * std::exp(asr) *
            (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    }
    if (hk > -160.0) {
      const double b = std::sqrt(bs);
      bvn -= std::exp(-hk / 2.0) * kSqrt2Pi * norm_cdf(-b / a) * b *
             (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a /= 2.0;
    bvn += sum_rule([&](double t) {
      double xs = a * (1.0 - t);
      xs = xs * xs;
      const double rs = std::sqrt(1.0 - xs);
      const double asr2 = -(bs / xs + hk) / 2.0;
      if (asr2 <= -100.0) {
        return 0.0;
      }
      return a * std::exp(asr2) *
             (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
    });
    bvn /= -kTwoPi;
  }
  if (r > 0.0) {
    bvn += norm_cdf(-std::max(h, k));
  } else {
    bvn = -bvn;
    if (k > h) {
      if (h >= 0.0) {
        bvn += norm_cdf(-h) - norm_cdf(-k);
      } else {
        bvn += norm_cdf(k) - norm_cdf(h);
      }
    }
  }
  return std::clamp(bvn, 0.0, 1.0);
}

const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1) {
    throw std::invalid_argument("gauss_legendre: n must be positive");
  }
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, compute_gauss_legendre(n)).first;
  }
  // std::map nodes are stable, so the reference outlives the lock.
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n) {
  return integrate_composite(f, a, b, n, 1);
}

double integrate_composite(const std::function<double(double)>& f, double a, double b, int n,
                           int panels) {
  const auto& rule = gauss_legendre(n);
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    const double half = 0.5 * width;
    const double mid = lo + half;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    total += half * s;
  }
  return total;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 16;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) {
      s += v;
    }
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol,
              int max_iter) {
  double flo = f(lo);
  if (flo == 0.0) {
    return lo;
  }
  const double fhi = f(hi);
  if (fhi == 0.0) {
    return hi;
  }
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericalError("bisect: root not bracketed");
  }
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) {
      return mid;
    }
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double tol,
                 int max_iter) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) {
    return lo;
  }
  if (fhi == 0.0) {
    return hi;
  }
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericalError("find_root: root not bracketed");
  }
  boost::uintmax_t iters = static_cast<boost::uintmax_t>(max_iter);
  auto term = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  const auto bracket = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, term, iters);
  if (iters >= static_cast<boost::uintmax_t>(max_iter) &&
      std::abs(bracket.second - bracket.first) > tol) {
    throw NumericalError("find_root: tolerance not reached");
  }
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace trisieve::numerics
