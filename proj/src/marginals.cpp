#include "trisieve/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "trisieve/numerics.hpp"

namespace trisieve {

namespace {

constexpr double kSqrt3 = 1.73205080756887729353;

double t3_cdf(double x) {
  const double ax = std::abs(x);
  // Lower-tail form avoids 1/2 - 1/2 cancellation for negative x.
  const double lower = (std::atan(kSqrt3 / ax) - kSqrt3 * ax / (3.0 + ax * ax)) / numerics::kPi;
  if (x == 0.0) {
    return 0.5;
  }
  return x < 0.0 ? lower : 1.0 - lower;
}

double t3_pdf(double x) {
  const double d = 3.0 + x * x;
  return 6.0 * kSqrt3 / (numerics::kPi * d * d);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

double TransformG::cdf(double x) const {
  switch (kind_) {
    case TransformKind::StandardNormal:
      return numerics::norm_cdf(x);
    case TransformKind::StudentT3:
      return t3_cdf(x);
    case TransformKind::Logistic:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  return 0.0;
}

double TransformG::pdf(double x) const {
  switch (kind_) {
    case TransformKind::StandardNormal:
      return numerics::norm_pdf(x);
    case TransformKind::StudentT3:
      return t3_pdf(x);
    case TransformKind::Logistic: {
      const double e = std::exp(-std::abs(x));
      return e / ((1.0 + e) * (1.0 + e));
    }
  }
  return 0.0;
}

double TransformG::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw std::domain_error("transform quantile: probability outside [0,1]");
  }
  if (u == 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  if (u == 1.0) {
    return std::numeric_limits<double>::infinity();
  }
  switch (kind_) {
    case TransformKind::StandardNormal:
      return numerics::norm_quantile(u);
    case TransformKind::StudentT3:
      return boost::math::quantile(boost::math::students_t_distribution<double>(3.0), u);
    case TransformKind::Logistic:
      return std::log(u) - std::log1p(-u);
  }
  return 0.0;
}

std::string TransformG::name() const {
  switch (kind_) {
    case TransformKind::StandardNormal:
      return "normal";
    case TransformKind::StudentT3:
      return "t3";
    case TransformKind::Logistic:
      return "logistic";
  }
  return "unknown";
}

TransformG parse_transform(std::string_view name) {
  if (name == "normal") {
    return TransformG(TransformKind::StandardNormal);
  }
  if (name == "t3") {
    return TransformG(TransformKind::StudentT3);
  }
  if (name == "logistic") {
    return TransformG(TransformKind::Logistic);
  }
  throw std::invalid_argument("unknown transform '" + std::string(name) + "'");
}

ParametricMarginal::ParametricMarginal(std::variant<Normal, NormalMixture, StudentT> law)
    : law_(std::move(law)) {
  if (const auto* m = std::get_if<NormalMixture>(&law_)) {
    const std::size_t k = m->weights.size();
    if (k == 0 || m->means.size() != k || m->sigmas.size() != k) {
      throw std::invalid_argument("mixture: weights, means and sigmas must have equal nonzero length");
    }
    double wsum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (!(m->weights[j] > 0.0) || !(m->sigmas[j] > 0.0)) {
        throw std::invalid_argument("mixture: weights and sigmas must be positive");
      }
      wsum += m->weights[j];
    }
    if (std::abs(wsum - 1.0) > 1e-12) {
      throw std::invalid_argument("mixture: weights must sum to 1");
    }
    if (m->standardized) {
      double mean = 0.0;
      double second = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        mean += m->weights[j] * m->means[j];
        second += m->weights[j] * (m->sigmas[j] * m->sigmas[j] + m->means[j] * m->means[j]);
      }
      shift_ = mean;
      scale_ = std::sqrt(second - mean * mean);
    }
  } else if (const auto* nrm = std::get_if<Normal>(&law_)) {
    if (!(nrm->sigma > 0.0)) {
      throw std::invalid_argument("normal marginal: sigma must be positive");
    }
  } else if (const auto* t = std::get_if<StudentT>(&law_)) {
    if (!(t->df > 0.0)) {
      throw std::invalid_argument("student t marginal: df must be positive");
    }
  }
}

ParametricMarginal ParametricMarginal::normal(double mu, double sigma) {
  return ParametricMarginal(Normal{mu, sigma});
}

ParametricMarginal ParametricMarginal::mixture(std::vector<double> weights, std::vector<double> means,
                                               std::vector<double> sigmas, bool standardized) {
  return ParametricMarginal(
      NormalMixture{std::move(weights), std::move(means), std::move(sigmas), standardized});
}

ParametricMarginal ParametricMarginal::student_t(double df) { return ParametricMarginal(StudentT{df}); }

double ParametricMarginal::raw_mixture_cdf(double x) const {
  const auto& m = std::get<NormalMixture>(law_);
  double s = 0.0;
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    s += m.weights[j] * numerics::norm_cdf((x - m.means[j]) / m.sigmas[j]);
  }
  return s;
}

double ParametricMarginal::raw_mixture_pdf(double x) const {
  const auto& m = std::get<NormalMixture>(law_);
  double s = 0.0;
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    s += m.weights[j] * numerics::norm_pdf((x - m.means[j]) / m.sigmas[j]) / m.sigmas[j];
  }
  return s;
}

double ParametricMarginal::pdf(double x) const {
  if (const auto* n = std::get_if<Normal>(&law_)) {
    return numerics::norm_pdf((x - n->mu) / n->sigma) / n->sigma;
  }
  if (const auto* t = std::get_if<StudentT>(&law_)) {
    return boost::math::pdf(boost::math::students_t_distribution<double>(t->df), x);
  }
  return scale_ * raw_mixture_pdf(shift_ + scale_ * x);
}

double ParametricMarginal::cdf(double x) const {
  if (const auto* n = std::get_if<Normal>(&law_)) {
    return numerics::norm_cdf((x - n->mu) / n->sigma);
  }
  if (const auto* t = std::get_if<StudentT>(&law_)) {
    if (std::isinf(x)) {
      return x > 0 ? 1.0 : 0.0;
    }
    return boost::math::cdf(boost::math::students_t_distribution<double>(t->df), x);
  }
  return raw_mixture_cdf(shift_ + scale_ * x);
}

double ParametricMarginal::quantile(double p) const {
  if (const auto* n = std::get_if<Normal>(&law_)) {
    return n->mu + n->sigma * numerics::norm_quantile(p);
  }
  if (const auto* t = std::get_if<StudentT>(&law_)) {
    if (p <= 0.0 || p >= 1.0) {
      return bracketed_quantile([this](double x) { return cdf(x); }, p);
    }
    return boost::math::quantile(boost::math::students_t_distribution<double>(t->df), p);
  }
  return bracketed_quantile([this](double x) { return cdf(x); }, p);
}

double ParametricMarginal::mean() const {
  if (const auto* n = std::get_if<Normal>(&law_)) {
    return n->mu;
  }
  if (std::holds_alternative<StudentT>(law_)) {
    return 0.0;
  }
  const auto& m = std::get<NormalMixture>(law_);
  if (m.standardized) {
    return 0.0;
  }
  double s = 0.0;
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    s += m.weights[j] * m.means[j];
  }
  return s;
}

double ParametricMarginal::sd() const {
  if (const auto* n = std::get_if<Normal>(&law_)) {
    return n->sigma;
  }
  if (const auto* t = std::get_if<StudentT>(&law_)) {
    return t->df > 2.0 ? std::sqrt(t->df / (t->df - 2.0)) : std::numeric_limits<double>::infinity();
  }
  const auto& m = std::get<NormalMixture>(law_);
  if (m.standardized) {
    return 1.0;
  }
  const double mu = mean();
  double second = 0.0;
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    second += m.weights[j] * (m.sigmas[j] * m.sigmas[j] + m.means[j] * m.means[j]);
  }
  return std::sqrt(second - mu * mu);
}

std::string ParametricMarginal::describe() const {
  if (const auto* n = std::get_if<Normal>(&law_)) {
    return "normal(mu=" + fmt(n->mu) + ",sigma=" + fmt(n->sigma) + ")";
  }
  if (const auto* t = std::get_if<StudentT>(&law_)) {
    return "t(df=" + fmt(t->df) + ")";
  }
  const auto& m = std::get<NormalMixture>(law_);
  std::string s = m.standardized ? "standardized-mixture(" : "mixture(";
  for (std::size_t j = 0; j < m.weights.size(); ++j) {
    if (j > 0) {
      s += ";";
    }
    s += fmt(m.weights[j]) + "*N(" + fmt(m.means[j]) + "," + fmt(m.sigmas[j]) + "^2)";
  }
  return s + ")";
}

SieveMarginal::SieveMarginal(TransformG g, Eigen::VectorXd a) : g_(g), a_(std::move(a)) {
  if (a_.size() == 0) {
    throw std::invalid_argument("sieve marginal: empty coefficient vector");
  }
  Eigen::Index lead = 0;
  while (lead < a_.size() && a_[lead] == 0.0) {
    ++lead;
  }
  if (lead == a_.size()) {
    throw std::invalid_argument("sieve marginal: coefficients are all zero");
  }
  if (!a_.allFinite()) {
    throw std::invalid_argument("sieve marginal: non-finite coefficient");
  }
  const double pivot = a_[lead];
  if (pivot != 1.0) {
    a_ /= pivot;
  }
  const Eigen::Index k = a_.size();
  p_coef_ = Eigen::VectorXd::Zero(2 * k - 1);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      p_coef_[i + j] += a_[i] * a_[j];
    }
  }
  for (Eigen::Index m = 0; m < p_coef_.size(); ++m) {
    p_coef_[m] /= static_cast<double>(m + 1);
  }
  norm_ = p_coef_.sum();
  if (2 * k - 2 <= 127) {
    // 64-node Gauss-Legendre is exact for the degree of h.
    const auto& rule = numerics::gauss_legendre(64);
    double total = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      total += 0.5 * rule.weights[i] * h(0.5 * (1.0 + rule.nodes[i]));
    }
    if (std::abs(total - 1.0) > 1e-10) {
      throw NumericalError("sieve marginal: density normalization failed");
    }
  }
}

double SieveMarginal::h(double u) const {
  double q = 0.0;
  for (Eigen::Index k = a_.size() - 1; k >= 0; --k) {
    q = q * u + a_[k];
  }
  return q * q / norm_;
}

double SieveMarginal::H(double u) const {
  if (u <= 0.0) {
    return 0.0;
  }
  if (u >= 1.0) {
    return 1.0;
  }
  double p = 0.0;
  for (Eigen::Index m = p_coef_.size() - 1; m >= 0; --m) {
    p = p * u + p_coef_[m];
  }
  return std::clamp(u * p / norm_, 0.0, 1.0);
}

double SieveMarginal::H_with_grad(double u, double* grad) const {
  const Eigen::Index k = a_.size();
  const double uc = std::clamp(u, 0.0, 1.0);
  double p = 0.0;
  for (Eigen::Index m = p_coef_.size() - 1; m >= 0; --m) {
    p = p * uc + p_coef_[m];
  }
  p *= uc;
  const double hval = p / norm_;
  // u^(j+1) for j = 0 .. 2k-2.
  double pw[256];
  double* pow_u = pw;
  std::vector<double> heap;
  if (2 * k > 256) {
    heap.resize(2 * k);
    pow_u = heap.data();
  }
  pow_u[0] = uc;
  for (Eigen::Index j = 1; j < 2 * k - 1; ++j) {
    pow_u[j] = pow_u[j - 1] * uc;
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    double dp = 0.0;
    double dn = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double inv = 1.0 / static_cast<double>(i + j + 1);
      dp += a_[i] * pow_u[i + j] * inv;
      dn += a_[i] * inv;
    }
    grad[j] = 2.0 * (dp - hval * dn) / norm_;
  }
  return std::clamp(hval, 0.0, 1.0);
}

double SieveMarginal::quantile(double p) const {
  return bracketed_quantile([this](double x) { return cdf(x); }, p);
}

double bracketed_quantile(const std::function<double(double)>& cdf, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error("quantile: probability outside [0,1]");
  }
  if (p == 0.0) {
    return -std::numeric_limits<double>::infinity();
  }
  if (p == 1.0) {
    return std::numeric_limits<double>::infinity();
  }
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && cdf(lo) > p; ++i) {
    lo *= 2.0;
  }
  for (int i = 0; i < 200 && cdf(hi) < p; ++i) {
    hi *= 2.0;
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      break;
    }
    if (cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ParametricMarginal calibrate_mixture(double target_ate, double delta1) {
  return calibrate_mixture(target_ate, delta1, {0.6, 0.4}, {-1.0, 1.5}, true);
}

ParametricMarginal calibrate_mixture(double target_ate, double delta1, const std::vector<double>& weights,
                                     const std::vector<double>& means, bool standardized) {
  auto build = [&](double sigma) {
    return ParametricMarginal::mixture(weights, means, std::vector<double>(weights.size(), sigma), standardized);
  };
  auto gap = [&](double sigma) {
    const ParametricMarginal m = build(sigma);
    return m.cdf(delta1) - m.cdf(0.0) - target_ate;
  };
  const bool flat = std::all_of(means.begin(), means.end(), [&](double m) { return m == means.front(); });
  if (flat && standardized) {
    if (std::abs(gap(1.0)) > 1e-5) {
      throw NumericalError("calibrate_mixture: target not reachable (standardized law is fixed)");
    }
    return build(1.0);
  }
  // ATE(sigma) is scanned on a log grid; the first sign change is refined.
  const double lo_sigma = 1e-3;
  const double hi_sigma = 1e3;
  constexpr int kScan = 120;
  double prev_s = lo_sigma;
  double prev_g = gap(prev_s);
  for (int i = 1; i <= kScan; ++i) {
    const double s = lo_sigma * std::pow(hi_sigma / lo_sigma, static_cast<double>(i) / kScan);
    const double gs = gap(s);
    if (prev_g == 0.0) {
      return build(prev_s);
    }
    if ((prev_g > 0.0) != (gs > 0.0)) {
      const double root = numerics::find_root(gap, prev_s, s, 1e-14);
      return build(root);
    }
    prev_s = s;
    prev_g = gs;
  }
  throw NumericalError("calibrate_mixture: target ATE " + fmt(target_ate) +
                       " is outside the reachable range");
}

int SieveOrderPolicy::order_for(std::size_t n) const {
  const double nn = static_cast<double>(n);
  switch (kind) {
    case Kind::Proportional:
      return static_cast<int>(std::lround(constant * std::pow(nn, 1.0 / 7.0)));
    case Kind::TheoryRate:
      return static_cast<int>(std::lround(constant * std::pow(nn, 1.0 / (2.0 * smoothness + 1.0))));
    case Kind::Fixed:
      return fixed_order;
  }
  return fixed_order;
}

}  // namespace trisieve
