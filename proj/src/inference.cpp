#include "trisieve/inference.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "trisieve/likelihood.hpp"
#include "trisieve/numerics.hpp"
#include "trisieve/parallel.hpp"
#include "trisieve/rng.hpp"

namespace trisieve {

EfficientScoreFit efficient_score_variance(const FitResult& fit, const Dataset& data) {
  const ParameterMap& map = fit.map;
  const LoglikEval ev = evaluate_loglik(map, fit.free_hat, data, nullptr, false, true);
  const Eigen::Index n = data.n();
  const Eigen::Index dpsi = map.psi_size();
  const Eigen::Index dn = map.size() - dpsi;

  Eigen::MatrixXd psi_scores = ev.scores.leftCols(dpsi);
  const double drho = copula::dnative_dunconstrained(map.spec().copula, fit.free_hat[map.rho_index()]);
  psi_scores.col(map.rho_index()) /= drho;

  EfficientScoreFit out;
  const auto all_names = map.names();
  out.names.assign(all_names.begin(), all_names.begin() + dpsi);
  out.nuisance_dim = dn;
  Eigen::MatrixXd resid = psi_scores;
  if (dn > 0) {
    const Eigen::MatrixXd nuis = ev.scores.rightCols(dn);
    out.b = nuis.colPivHouseholderQr().solve(psi_scores);
    resid = psi_scores - nuis * out.b;
    out.max_orthogonality = (nuis.transpose() * resid).cwiseAbs().maxCoeff() / static_cast<double>(n);
  } else {
    out.b.resize(0, dpsi);
  }
  Eigen::MatrixXd I = resid.transpose() * resid / static_cast<double>(n);
  I = 0.5 * (I + I.transpose()).eval();
  out.I_star_hat = I;

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(I);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  out.max_eigenvalue = eig.eigenvalues().maxCoeff();
  if (!(out.min_eigenvalue > 1e-12 * std::max(out.max_eigenvalue, 1e-300))) {
    std::ostringstream msg;
    msg << "efficient information is singular (min eigenvalue " << out.min_eigenvalue << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::MatrixXd inv =
      eig.eigenvectors() * eig.eigenvalues().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
  out.covariance = inv / static_cast<double>(n);
  out.se = out.covariance.diagonal().cwiseSqrt();
  return out;
}

Eigen::VectorXd ate_gradient(const ParameterMap& map, const Eigen::VectorXd& free, const Eigen::VectorXd& x) {
  const Theta theta = map.unpack(free);
  if (x.size() != theta.beta.size()) {
    throw std::invalid_argument("ate_gradient: covariate vector has the wrong length");
  }
  const MarginalModel eps(map.spec().eps, theta.eps);
  const int ne = eps.free_count();
  std::vector<double> g0(static_cast<std::size_t>(std::max(ne, 1)), 0.0);
  std::vector<double> g1(static_cast<std::size_t>(std::max(ne, 1)), 0.0);
  const double i0 = theta.beta0 + x.dot(theta.beta);
  double F0 = 0.0;
  double f0 = 0.0;
  double F1 = 0.0;
  double f1 = 0.0;
  eps.eval(i0, F0, f0, ne > 0 ? g0.data() : nullptr);
  eps.eval(i0 + theta.delta1, F1, f1, ne > 0 ? g1.data() : nullptr);

  Eigen::VectorXd c = Eigen::VectorXd::Zero(map.size());
  const Eigen::Index eps_start = map.psi_size();
  const auto& params = map.params();
  for (Eigen::Index j = 0; j < map.size(); ++j) {
    const FreeParam& fp = params[static_cast<std::size_t>(j)];
    switch (fp.role) {
      case ParamRole::Beta0:
        c[j] = f1 - f0;
        break;
      case ParamRole::Beta:
        c[j] = (f1 - f0) * x[fp.index];
        break;
      case ParamRole::Delta1:
        c[j] = f1;
        break;
      case ParamRole::EpsMu:
      case ParamRole::EpsLogSigma:
      case ParamRole::EpsSieve: {
        const auto k = static_cast<std::size_t>(j - eps_start);
        c[j] = g1[k] - g0[k];
        break;
      }
      default:
        break;
    }
  }
  return c;
}

double ate_directional_derivative(const ParameterMap& map, const Eigen::VectorXd& free,
                                  const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
  if (v.size() != map.size()) {
    throw std::invalid_argument("ate_directional_derivative: direction has the wrong length");
  }
  return ate_gradient(map, free, x).dot(v);
}

AteVariance ate_variance(const FitResult& fit, const Dataset& data, const Eigen::VectorXd& x) {
  const LoglikEval ev = evaluate_loglik(fit.map, fit.free_hat, data, nullptr, false, true);
  const auto n = static_cast<double>(data.n());
  Eigen::MatrixXd I = ev.scores.transpose() * ev.scores / n;
  I = 0.5 * (I + I.transpose()).eval();
  const Eigen::VectorXd c = ate_gradient(fit.map, fit.free_hat, x);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(I);
  const double top = eig.eigenvalues().maxCoeff();
  if (!(eig.eigenvalues().minCoeff() > 1e-12 * std::max(top, 1e-300))) {
    std::ostringstream msg;
    msg << "score outer product is singular (min eigenvalue " << eig.eigenvalues().minCoeff() << ")";
    throw NumericalError(msg.str());
  }
  // The supremum of (c'v)^2 / v'Iv is attained at v proportional to I^{-1} c.
  const Eigen::VectorXd u = eig.eigenvectors().transpose() * c;
  const Eigen::VectorXd w = eig.eigenvectors() * u.cwiseQuotient(eig.eigenvalues());
  AteVariance out;
  out.ate = ate(fit.spec(), fit.theta_hat, x);
  out.sigma2 = std::max(c.dot(w), 0.0);
  out.se = std::sqrt(out.sigma2 / n);
  out.maximizer = out.sigma2 > 0.0 ? Eigen::VectorXd(w / std::sqrt(out.sigma2)) : Eigen::VectorXd(w);
  return out;
}

Target Target::alpha(int j, std::string name) { return {Kind::Alpha, j, {}, std::move(name)}; }
Target Target::beta(int j, std::string name) { return {Kind::Beta, j, {}, std::move(name)}; }
Target Target::gamma(int j, std::string name) { return {Kind::Gamma, j, {}, std::move(name)}; }
Target Target::delta1() { return {Kind::Delta1, 0, {}, "delta1"}; }
Target Target::rho() { return {Kind::Rho, 0, {}, "rho"}; }
Target Target::rho_spearman() { return {Kind::RhoSpearman, 0, {}, "rho_sp"}; }
Target Target::ate(Eigen::VectorXd x) { return {Kind::Ate, 0, std::move(x), "ATE"}; }

double target_value(const Target& target, const FitResult& fit) {
  const Theta& th = fit.theta_hat;
  auto at = [](const Eigen::VectorXd& v, int j) {
    if (j < 0 || j >= v.size()) {
      throw std::invalid_argument("target: coefficient index out of range");
    }
    return v[j];
  };
  switch (target.kind) {
    case Target::Kind::Alpha:
      return at(th.alpha, target.index);
    case Target::Kind::Beta:
      return at(th.beta, target.index);
    case Target::Kind::Gamma:
      return at(th.gamma, target.index);
    case Target::Kind::Delta1:
      return th.delta1;
    case Target::Kind::Rho:
      return th.rho;
    case Target::Kind::RhoSpearman:
      return fitted_spearman(fit);
    case Target::Kind::Ate:
      return ate(fit.spec(), th, target.x);
  }
  return 0.0;
}

Eigen::VectorXd bootstrap_weights(BootstrapWeights scheme, Eigen::Index n, std::uint64_t seed, std::uint64_t b) {
  Eigen::VectorXd w(n);
  if (scheme == BootstrapWeights::Unit) {
    w.setOnes();
    return w;
  }
  RngStream rng(seed, b);
  // log W ~ N(-s^2/2, s^2) with s^2 = ln 2 has mean 1 and variance 1.
  const double s2 = std::log(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    w[i] = scheme == BootstrapWeights::Exponential ? rng.exponential()
                                                   : std::exp(-0.5 * s2 + std::sqrt(s2) * rng.normal());
  }
  return w;
}

double order_statistic(std::vector<double> values, double tau) {
  if (values.empty()) {
    throw std::invalid_argument("order_statistic: no values");
  }
  const auto m = static_cast<long>(values.size());
  // The small offset keeps exact products such as 0.025 * 200 from rounding up.
  long rank = static_cast<long>(std::ceil(tau * static_cast<double>(m) - 1e-9));
  rank = std::clamp(rank, 1L, m);
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[static_cast<std::size_t>(rank - 1)];
}

BootstrapResult weighted_bootstrap(const Dataset& data, const FitResult& fit, const std::vector<Target>& targets,
                                   const BootstrapOptions& options) {
  if (options.B < 2) {
    throw std::invalid_argument("weighted_bootstrap: B must be at least 2");
  }
  const auto nt = static_cast<Eigen::Index>(targets.size());
  const auto B = static_cast<std::size_t>(options.B);
  std::vector<std::optional<Eigen::VectorXd>> draws(B);
  parallel_for(B, options.threads, [&](std::size_t b) {
    const Eigen::VectorXd w = bootstrap_weights(options.weights, data.n(), options.seed, b);
    try {
      const FitResult r = fit_from(data, fit.map, fit.free_hat, options.optimizer, &w);
      if (!r.converged) {
        return;
      }
      Eigen::VectorXd t(nt);
      for (Eigen::Index k = 0; k < nt; ++k) {
        t[k] = target_value(targets[static_cast<std::size_t>(k)], r);
      }
      draws[b] = std::move(t);
    } catch (const NumericalError&) {
    } catch (const std::domain_error&) {
    }
  });

  BootstrapResult out;
  out.targets = targets;
  out.B = options.B;
  out.point.resize(nt);
  for (Eigen::Index k = 0; k < nt; ++k) {
    out.point[k] = target_value(targets[static_cast<std::size_t>(k)], fit);
  }
  for (std::size_t b = 0; b < B; ++b) {
    if (draws[b]) {
      out.draw_index.push_back(static_cast<int>(b));
    } else {
      ++out.failures;
    }
  }
  if (static_cast<double>(out.failures) > options.max_fail_share * static_cast<double>(options.B)) {
    std::ostringstream msg;
    msg << "weighted bootstrap: " << out.failures << " of " << options.B << " refits failed";
    throw NumericalError(msg.str());
  }
  const auto m = static_cast<Eigen::Index>(out.draw_index.size());
  out.estimates.resize(m, nt);
  for (Eigen::Index r = 0; r < m; ++r) {
    out.estimates.row(r) = draws[static_cast<std::size_t>(out.draw_index[static_cast<std::size_t>(r)])]->transpose();
  }
  out.se.resize(nt);
  out.pci.assign(static_cast<std::size_t>(nt), {});
  out.normal_ci.assign(static_cast<std::size_t>(nt), {});
  for (Eigen::Index k = 0; k < nt; ++k) {
    std::vector<double> col(static_cast<std::size_t>(m));
    for (Eigen::Index r = 0; r < m; ++r) {
      col[static_cast<std::size_t>(r)] = out.estimates(r, k);
    }
    const double mean = numerics::pairwise_sum(col) / static_cast<double>(m);
    std::vector<double> dev(col.size());
    for (std::size_t r = 0; r < col.size(); ++r) {
      dev[r] = (col[r] - mean) * (col[r] - mean);
    }
    out.se[k] = std::sqrt(numerics::pairwise_sum(dev) / static_cast<double>(m));
    for (double level : options.levels) {
      const double p = 1.0 - level;
      out.pci[static_cast<std::size_t>(k)].push_back(
          {level, order_statistic(col, 0.5 * p), order_statistic(col, 1.0 - 0.5 * p)});
      const double z = numerics::norm_quantile(1.0 - 0.5 * p);
      out.normal_ci[static_cast<std::size_t>(k)].push_back(
          {level, out.point[k] - z * out.se[k], out.point[k] + z * out.se[k]});
    }
  }
  return out;
}

}  // namespace trisieve
