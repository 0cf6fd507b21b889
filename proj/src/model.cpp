#include "trisieve/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace trisieve {

int MarginalSpec::free_count() const {
  switch (kind) {
    case MarginalKind::Fixed:
      return 0;
    case MarginalKind::LocationScale:
      return 2;
    case MarginalKind::Sieve:
      return sieve_order;
  }
  return 0;
}

std::string MarginalSpec::describe() const {
  switch (kind) {
    case MarginalKind::Fixed:
      return "fixed(" + base.name() + ")";
    case MarginalKind::LocationScale:
      return "location-scale(" + base.name() + ")";
    case MarginalKind::Sieve:
      return "sieve(G=" + base.name() + ",k=" + std::to_string(sieve_order) + ")";
  }
  return "unknown";
}

Normalization Normalization::fixed_coefficient(std::vector<std::pair<int, double>> alpha_pins,
                                               std::vector<std::pair<int, double>> beta_pins) {
  Normalization n;
  n.scheme = Scheme::FixedCoefficient;
  n.alpha_pinned = std::move(alpha_pins);
  n.beta_pinned = std::move(beta_pins);
  return n;
}

std::string Normalization::describe() const {
  if (scheme == Scheme::MeanVarUnit) {
    return "mean-var-unit";
  }
  std::string s = "fixed-coefficient(";
  auto list = [](const std::vector<std::pair<int, double>>& pins, const char* tag) {
    std::string out;
    for (const auto& [idx, val] : pins) {
      if (!out.empty()) {
        out += ",";
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s[%d]=%.6g", tag, idx, val);
      out += buf;
    }
    return out;
  };
  const std::string a = list(alpha_pinned, "alpha");
  const std::string b = list(beta_pinned, "beta");
  s += a;
  if (!a.empty() && !b.empty()) {
    s += ",";
  }
  return s + b + ")";
}

void ModelSpec::validate(Eigen::Index kx, Eigen::Index kz) const {
  auto check_pins = [&](const std::vector<std::pair<int, double>>& pins, const char* what) {
    std::vector<int> seen;
    for (const auto& [idx, val] : pins) {
      if (idx < 0 || idx >= kx) {
        throw std::invalid_argument(std::string(what) + " pin refers to a missing x column");
      }
      if (!std::isfinite(val)) {
        throw std::invalid_argument(std::string(what) + " pin must be finite");
      }
      if (std::find(seen.begin(), seen.end(), idx) != seen.end()) {
        throw std::invalid_argument(std::string(what) + " pinned twice at one column");
      }
      seen.push_back(idx);
    }
  };
  check_pins(normalization.alpha_pinned, "alpha");
  check_pins(normalization.beta_pinned, "beta");
  if (kz < 0 || kx < 0) {
    throw std::invalid_argument("negative covariate dimension");
  }
  if (eps.sieve_order < 0 || nu.sieve_order < 0) {
    throw std::invalid_argument("sieve order must be nonnegative");
  }
  if (normalization.scheme == Normalization::Scheme::MeanVarUnit) {
    if (eps.kind != MarginalKind::Fixed || nu.kind != MarginalKind::Fixed) {
      throw std::invalid_argument(
          "mean-var-unit normalization requires fixed marginals; use fixed-coefficient for "
          "location-scale or sieve marginals");
    }
    if (!normalization.alpha_pinned.empty() || !normalization.beta_pinned.empty()) {
      throw std::invalid_argument("mean-var-unit normalization does not pin coefficients");
    }
    return;
  }
  if (eps.kind != MarginalKind::Fixed && normalization.beta_pinned.empty()) {
    throw std::invalid_argument("a free outcome marginal needs a pinned beta coefficient");
  }
  if (nu.kind != MarginalKind::Fixed && normalization.alpha_pinned.empty()) {
    throw std::invalid_argument("a free treatment marginal needs a pinned alpha coefficient");
  }
}

std::string ModelSpec::describe() const {
  return "copula=" + to_string(copula) + ";eps=" + eps.describe() + ";nu=" + nu.describe() +
         ";normalization=" + normalization.describe();
}

namespace {

bool pinned(const std::vector<std::pair<int, double>>& pins, int j, double* value) {
  for (const auto& [idx, val] : pins) {
    if (idx == j) {
      if (value != nullptr) {
        *value = val;
      }
      return true;
    }
  }
  return false;
}

std::string col_name(const std::vector<std::string>& names, int j, const char* prefix) {
  if (j < static_cast<int>(names.size())) {
    return names[static_cast<std::size_t>(j)];
  }
  return std::string(prefix) + std::to_string(j + 1);
}

}  // namespace

ParameterMap::ParameterMap(ModelSpec spec, Eigen::Index kx, Eigen::Index kz,
                           std::vector<std::string> x_names, std::vector<std::string> z_names)
    : spec_(std::move(spec)), kx_(kx), kz_(kz) {
  spec_.validate(kx, kz);
  const bool intercepts = spec_.normalization.has_intercepts();
  if (intercepts) {
    params_.push_back({ParamRole::Alpha0, 0, "alpha[const]"});
  }
  for (int j = 0; j < kx; ++j) {
    if (!pinned(spec_.normalization.alpha_pinned, j, nullptr)) {
      params_.push_back({ParamRole::Alpha, j, "alpha[" + col_name(x_names, j, "x") + "]"});
    }
  }
  if (intercepts) {
    params_.push_back({ParamRole::Beta0, 0, "beta[const]"});
  }
  for (int j = 0; j < kx; ++j) {
    if (!pinned(spec_.normalization.beta_pinned, j, nullptr)) {
      params_.push_back({ParamRole::Beta, j, "beta[" + col_name(x_names, j, "x") + "]"});
    }
  }
  delta1_index_ = size();
  params_.push_back({ParamRole::Delta1, 0, "delta1"});
  gamma_index_ = size();
  for (int j = 0; j < kz; ++j) {
    params_.push_back({ParamRole::Gamma, j, "gamma[" + col_name(z_names, j, "z") + "]"});
  }
  params_.push_back({ParamRole::Rho, 0, "rho"});
  psi_size_ = size();
  auto add_marginal = [&](const MarginalSpec& m, ParamRole mu, ParamRole ls, ParamRole sv,
                          const std::string& tag) {
    if (m.kind == MarginalKind::LocationScale) {
      params_.push_back({mu, 0, tag + ".mu"});
      params_.push_back({ls, 0, tag + ".log_sigma"});
    } else if (m.kind == MarginalKind::Sieve) {
      for (int k = 1; k <= m.sieve_order; ++k) {
        params_.push_back({sv, k, tag + ".a" + std::to_string(k)});
      }
    }
  };
  add_marginal(spec_.eps, ParamRole::EpsMu, ParamRole::EpsLogSigma, ParamRole::EpsSieve, "eps");
  add_marginal(spec_.nu, ParamRole::NuMu, ParamRole::NuLogSigma, ParamRole::NuSieve, "nu");
}

std::vector<std::string> ParameterMap::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& p : params_) {
    out.push_back(p.name);
  }
  return out;
}

Theta ParameterMap::default_theta() const {
  Theta t;
  t.alpha = Eigen::VectorXd::Zero(kx_);
  t.beta = Eigen::VectorXd::Zero(kx_);
  t.gamma = Eigen::VectorXd::Zero(kz_);
  for (const auto& [idx, val] : spec_.normalization.alpha_pinned) {
    t.alpha[idx] = val;
  }
  for (const auto& [idx, val] : spec_.normalization.beta_pinned) {
    t.beta[idx] = val;
  }
  t.rho = DependenceParam::independence(spec_.copula).rho();
  auto init = [](const MarginalSpec& m, MarginalParams& p) {
    if (m.kind == MarginalKind::Sieve) {
      p.a = Eigen::VectorXd::Zero(m.sieve_order + 1);
      p.a[0] = 1.0;
    }
  };
  init(spec_.eps, t.eps);
  init(spec_.nu, t.nu);
  return t;
}

Theta ParameterMap::unpack(const Eigen::VectorXd& free) const {
  if (free.size() != size()) {
    throw std::invalid_argument("parameter vector has the wrong length");
  }
  Theta t = default_theta();
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const FreeParam& p = params_[i];
    const double v = free[static_cast<Eigen::Index>(i)];
    switch (p.role) {
      case ParamRole::Alpha0:
        t.alpha0 = v;
        break;
      case ParamRole::Alpha:
        t.alpha[p.index] = v;
        break;
      case ParamRole::Beta0:
        t.beta0 = v;
        break;
      case ParamRole::Beta:
        t.beta[p.index] = v;
        break;
      case ParamRole::Delta1:
        t.delta1 = v;
        break;
      case ParamRole::Gamma:
        t.gamma[p.index] = v;
        break;
      case ParamRole::Rho:
        t.rho = copula::native_from_unconstrained(spec_.copula, v);
        break;
      case ParamRole::EpsMu:
        t.eps.mu = v;
        break;
      case ParamRole::EpsLogSigma:
        t.eps.sigma = std::exp(v);
        break;
      case ParamRole::EpsSieve:
        t.eps.a[p.index] = v;
        break;
      case ParamRole::NuMu:
        t.nu.mu = v;
        break;
      case ParamRole::NuLogSigma:
        t.nu.sigma = std::exp(v);
        break;
      case ParamRole::NuSieve:
        t.nu.a[p.index] = v;
        break;
    }
  }
  return t;
}

Eigen::VectorXd ParameterMap::pack(const Theta& t) const {
  Eigen::VectorXd free(size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const FreeParam& p = params_[i];
    double v = 0.0;
    switch (p.role) {
      case ParamRole::Alpha0:
        v = t.alpha0;
        break;
      case ParamRole::Alpha:
        v = t.alpha[p.index];
        break;
      case ParamRole::Beta0:
        v = t.beta0;
        break;
      case ParamRole::Beta:
        v = t.beta[p.index];
        break;
      case ParamRole::Delta1:
        v = t.delta1;
        break;
      case ParamRole::Gamma:
        v = t.gamma[p.index];
        break;
      case ParamRole::Rho:
        v = copula::unconstrained_from_native(spec_.copula, t.rho);
        break;
      case ParamRole::EpsMu:
        v = t.eps.mu;
        break;
      case ParamRole::EpsLogSigma:
        v = std::log(t.eps.sigma);
        break;
      case ParamRole::EpsSieve:
        v = t.eps.a[p.index] / t.eps.a[0];
        break;
      case ParamRole::NuMu:
        v = t.nu.mu;
        break;
      case ParamRole::NuLogSigma:
        v = std::log(t.nu.sigma);
        break;
      case ParamRole::NuSieve:
        v = t.nu.a[p.index] / t.nu.a[0];
        break;
    }
    free[static_cast<Eigen::Index>(i)] = v;
  }
  return free;
}

Eigen::VectorXd ParameterMap::lower_bounds() const {
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(size(), -kCoefficientBound);
  lo[rho_index()] = copula::unconstrained_bounds(spec_.copula).first;
  return lo;
}

Eigen::VectorXd ParameterMap::upper_bounds() const {
  Eigen::VectorXd hi = Eigen::VectorXd::Constant(size(), kCoefficientBound);
  hi[rho_index()] = copula::unconstrained_bounds(spec_.copula).second;
  return hi;
}

MarginalModel::MarginalModel(const MarginalSpec& spec, const MarginalParams& params)
    : spec_(spec), mu_(params.mu), sigma_(params.sigma), free_count_(spec.free_count()) {
  if (spec.kind == MarginalKind::LocationScale && !(sigma_ > 0.0)) {
    throw std::invalid_argument("location-scale marginal needs sigma > 0");
  }
  if (spec.kind == MarginalKind::Sieve) {
    sieve_.emplace_back(spec.base, params.a);
  }
}

void MarginalModel::eval(double x, double& F, double& f, double* grad) const {
  switch (spec_.kind) {
    case MarginalKind::Fixed:
      F = spec_.base.cdf(x);
      f = spec_.base.pdf(x);
      return;
    case MarginalKind::LocationScale: {
      const double w = (x - mu_) / sigma_;
      const double g = spec_.base.pdf(w);
      F = spec_.base.cdf(w);
      f = g / sigma_;
      if (grad != nullptr) {
        grad[0] = -g / sigma_;
        grad[1] = -g * w;
      }
      return;
    }
    case MarginalKind::Sieve: {
      const SieveMarginal& s = sieve_.front();
      const double u = spec_.base.cdf(x);
      f = s.h(u) * spec_.base.pdf(x);
      if (grad != nullptr && free_count_ > 0) {
        double buf[64];
        std::vector<double> heap;
        double* all = buf;
        if (free_count_ + 1 > 64) {
          heap.resize(static_cast<std::size_t>(free_count_) + 1);
          all = heap.data();
        }
        F = s.H_with_grad(u, all);
        for (int k = 0; k < free_count_; ++k) {
          grad[k] = all[k + 1];
        }
      } else {
        F = s.H(u);
      }
      return;
    }
  }
}

double MarginalModel::cdf(double x) const {
  double F = 0.0;
  double f = 0.0;
  eval(x, F, f, nullptr);
  return F;
}

}  // namespace trisieve
