#include "trisieve/estimator.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "trisieve/likelihood.hpp"
#include "trisieve/numerics.hpp"
#include "trisieve/rng.hpp"

namespace trisieve {

namespace {

void check_dataset(const Dataset& data, std::vector<std::string>& warnings) {
  data.validate();
  const bool y_const = (data.y.array() == data.y[0]).all();
  const bool d_const = (data.d.array() == data.d[0]).all();
  if (y_const) {
    throw DataError("degenerate dataset: y is constant");
  }
  if (d_const) {
    throw DataError("degenerate dataset: d is constant");
  }
  if (!data.has_varying_instrument()) {
    warnings.emplace_back(
        "no instrument column varies; without an excluded instrument delta1 and rho may not be "
        "separately identified");
  }
}

// Native dependence value used to start the joint fit after the two-step
// stage. Families that cannot express negative dependence start at a small
// positive Spearman rho so the bijection is away from its boundary.
double starting_rho(CopulaFamily family) {
  if (family == CopulaFamily::Gaussian || family == CopulaFamily::Frank) {
    return 0.0;
  }
  static std::once_flag once;
  static double clayton = 0.0;
  static double gumbel = 1.0;
  std::call_once(once, [] {
    clayton = copula::from_spearman(CopulaFamily::Clayton, 0.1).rho();
    gumbel = copula::from_spearman(CopulaFamily::Gumbel, 0.1).rho();
  });
  return family == CopulaFamily::Clayton ? clayton : gumbel;
}

Objective make_objective(const ParameterMap& map, const Dataset& data, const Eigen::VectorXd* weights) {
  return [&map, &data, weights](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    LoglikEval ev = evaluate_loglik(map, x, data, weights, grad != nullptr, false);
    if (grad != nullptr) {
      *grad = std::move(ev.grad);
    }
    return ev.value;
  };
}

FitResult make_result(const ParameterMap& map, const OptimizerResult& opt) {
  return FitResult{map,
                   map.unpack(opt.x),
                   opt.x,
                   opt.value,
                   opt.iterations,
                   opt.evaluations,
                   opt.converged,
                   opt.grad_norm,
                   1,
                   opt.converged ? 1 : 0,
                   map.spec().normalization.describe(),
                   {}};
}

// Best converged candidate by log-likelihood; the earliest start wins ties.
// Falls back to the best non-converged candidate.
FitResult pick_best(std::vector<FitResult> candidates, std::vector<std::string> warnings) {
  if (candidates.empty()) {
    throw NumericalError("no start points were optimized");
  }
  int best = -1;
  int converged = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].converged) {
      continue;
    }
    ++converged;
    if (best < 0 || candidates[i].loglik_value > candidates[static_cast<std::size_t>(best)].loglik_value) {
      best = static_cast<int>(i);
    }
  }
  if (best < 0) {
    best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      if (candidates[i].loglik_value > candidates[static_cast<std::size_t>(best)].loglik_value) {
        best = static_cast<int>(i);
      }
    }
    warnings.emplace_back("no start point reached the gradient tolerance");
  }
  FitResult out = std::move(candidates[static_cast<std::size_t>(best)]);
  int iters = 0;
  int evals = 0;
  for (const auto& c : candidates) {
    iters += c.iterations;
    evals += c.evaluations;
  }
  out.iterations = iters;
  out.evaluations = evals;
  out.start_points_used = static_cast<int>(candidates.size());
  out.starts_converged = converged;
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace

FitResult fit_from(const Dataset& data, const ParameterMap& map, const Eigen::VectorXd& start,
                   const OptimizerOptions& options, const Eigen::VectorXd* weights) {
  const Objective obj = make_objective(map, data, weights);
  const OptimizerResult opt = maximize_bfgs(obj, start, map.lower_bounds(), map.upper_bounds(), options);
  return make_result(map, opt);
}

FitResult fit_parametric(const Dataset& data, const ModelSpec& spec, const FitOptions& options,
                         const Eigen::VectorXd* weights) {
  std::vector<std::string> warnings;
  check_dataset(data, warnings);
  if (spec.is_sieve()) {
    throw std::invalid_argument("fit_parametric: model has sieve marginals; use fit_sieve");
  }
  const ParameterMap map(spec, data.kx(), data.kz(), data.x_names, data.z_names);
  if (options.start) {
    FitResult r = fit_from(data, map, *options.start, options.optimizer, weights);
    r.warnings = std::move(warnings);
    return r;
  }

  // Two-step stage: under the independence copula the likelihood splits into
  // a binary model for d and one for y with d treated as exogenous.
  ModelSpec indep_spec = spec;
  indep_spec.copula = CopulaFamily::Gaussian;
  const ParameterMap indep_map(indep_spec, data.kx(), data.kz(), data.x_names, data.z_names);
  Eigen::VectorXd lo = indep_map.lower_bounds();
  Eigen::VectorXd hi = indep_map.upper_bounds();
  lo[indep_map.rho_index()] = 0.0;
  hi[indep_map.rho_index()] = 0.0;
  Eigen::VectorXd x0 = indep_map.pack(indep_map.default_theta());
  x0[indep_map.rho_index()] = 0.0;
  const OptimizerResult stage1 =
      maximize_bfgs(make_objective(indep_map, data, weights), x0, lo, hi, options.optimizer);
  Eigen::VectorXd warm = stage1.x;
  warm[map.rho_index()] = copula::unconstrained_from_native(spec.copula, starting_rho(spec.copula));

  std::vector<Eigen::VectorXd> starts{warm};
  for (int j = 1; j < options.n_starts; ++j) {
    RngStream rng(options.seed, static_cast<std::uint64_t>(j));
    Eigen::VectorXd s = warm;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
      const double scale = s[k] != 0.0 ? std::abs(s[k]) : 1.0;
      s[k] += options.jitter_scale * scale * rng.normal();
    }
    starts.push_back(s.cwiseMax(map.lower_bounds()).cwiseMin(map.upper_bounds()));
  }
  std::vector<FitResult> candidates;
  for (const auto& s : starts) {
    candidates.push_back(fit_from(data, map, s, options.optimizer, weights));
  }
  FitResult best = pick_best(std::move(candidates), std::move(warnings));
  best.iterations += stage1.iterations;
  best.evaluations += stage1.evaluations;
  return best;
}

ModelSpec parametric_counterpart(const ModelSpec& sieve_spec) {
  ModelSpec p = sieve_spec;
  const TransformG normal(TransformKind::StandardNormal);
  if (p.eps.kind == MarginalKind::Sieve) {
    p.eps = MarginalSpec::location_scale(normal);
  }
  if (p.nu.kind == MarginalKind::Sieve) {
    p.nu = MarginalSpec::location_scale(normal);
  }
  return p;
}

Eigen::VectorXd project_to_sieve(const TransformG& g, const MarginalSpec& location_scale,
                                 const MarginalParams& params, int order) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(order + 1);
  a[0] = 1.0;
  if (order == 0 || location_scale.kind != MarginalKind::LocationScale) {
    return a;
  }
  const auto& rule = numerics::gauss_legendre(64);
  const auto m = static_cast<Eigen::Index>(rule.nodes.size());
  Eigen::MatrixXd basis(m, order + 1);
  Eigen::VectorXd target(m);
  Eigen::VectorXd w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double u = 0.5 * (1.0 + rule.nodes[static_cast<std::size_t>(i)]);
    w[i] = std::sqrt(0.5 * rule.weights[static_cast<std::size_t>(i)]);
    const double x = g.quantile(u);
    const double wz = (x - params.mu) / params.sigma;
    const double h = location_scale.base.pdf(wz) / params.sigma / g.pdf(x);
    target[i] = w[i] * std::sqrt(std::max(h, 0.0));
    double pw = 1.0;
    for (int k = 0; k <= order; ++k) {
      basis(i, k) = w[i] * pw;
      pw *= u;
    }
  }
  const Eigen::VectorXd sol = basis.colPivHouseholderQr().solve(target);
  if (!sol.allFinite() || std::abs(sol[0]) < 1e-8) {
    return a;
  }
  a = sol / sol[0];
  return a.cwiseMax(-kCoefficientBound).cwiseMin(kCoefficientBound);
}

FitResult fit_sieve(const Dataset& data, const ModelSpec& spec, const FitOptions& options,
                    const FitResult* warm, const Eigen::VectorXd* weights) {
  std::vector<std::string> warnings;
  check_dataset(data, warnings);
  if (!spec.is_sieve()) {
    throw std::invalid_argument("fit_sieve: model has no sieve marginal");
  }
  if (spec.normalization.scheme != Normalization::Scheme::FixedCoefficient) {
    throw std::invalid_argument("fit_sieve: sieve marginals require fixed-coefficient normalization");
  }
  const ParameterMap map(spec, data.kx(), data.kz(), data.x_names, data.z_names);
  if (options.start) {
    FitResult r = fit_from(data, map, *options.start, options.optimizer, weights);
    r.warnings = std::move(warnings);
    return r;
  }
  std::optional<FitResult> own_warm;
  if (warm == nullptr) {
    own_warm = fit_parametric(data, parametric_counterpart(spec), options, weights);
    warm = &*own_warm;
  }
  if (warm->map.psi_size() != map.psi_size() || warm->spec().copula != spec.copula) {
    throw std::invalid_argument("fit_sieve: warm start has a different psi layout or copula");
  }
  Eigen::VectorXd base = map.pack(map.default_theta());
  base.head(map.psi_size()) = warm->free_hat.head(map.psi_size());

  std::vector<Eigen::VectorXd> starts{base};
  Eigen::VectorXd projected = base;
  Eigen::Index pos = map.psi_size();
  auto fill = [&](const MarginalSpec& s, const MarginalSpec& ws, const MarginalParams& wp) {
    if (s.kind != MarginalKind::Sieve) {
      return;
    }
    const Eigen::VectorXd a = project_to_sieve(s.base, ws, wp, s.sieve_order);
    for (int k = 1; k <= s.sieve_order; ++k) {
      projected[pos++] = a[k];
    }
  };
  fill(spec.eps, warm->spec().eps, warm->theta_hat.eps);
  fill(spec.nu, warm->spec().nu, warm->theta_hat.nu);
  if ((projected - base).cwiseAbs().maxCoeff() > 0.0) {
    starts.push_back(projected);
  }
  // The sieve likelihood is multimodal in the coefficients.
  const Eigen::VectorXd lo = map.lower_bounds();
  const Eigen::VectorXd hi = map.upper_bounds();
  for (int j = 0; j < options.sieve_random_starts; ++j) {
    RngStream rng(options.seed, static_cast<std::uint64_t>(1000 + j));
    Eigen::VectorXd s = base;
    for (Eigen::Index k = map.psi_size(); k < s.size(); ++k) {
      s[k] = options.sieve_start_scale * rng.normal();
    }
    starts.push_back(s.cwiseMax(lo).cwiseMin(hi));
  }
  std::vector<FitResult> candidates;
  for (const auto& s : starts) {
    candidates.push_back(fit_from(data, map, s, options.optimizer, weights));
  }
  return pick_best(std::move(candidates), std::move(warnings));
}

FitResult fit_model(const Dataset& data, const ModelSpec& spec, const FitOptions& options,
                    const Eigen::VectorXd* weights) {
  return spec.is_sieve() ? fit_sieve(data, spec, options, nullptr, weights)
                         : fit_parametric(data, spec, options, weights);
}

double ate(const ModelSpec& spec, const Theta& theta, const Eigen::VectorXd& x) {
  if (x.size() != theta.beta.size()) {
    throw std::invalid_argument("ate: covariate vector has the wrong length");
  }
  const MarginalModel eps(spec.eps, theta.eps);
  const double i0 = theta.beta0 + x.dot(theta.beta);
  return eps.cdf(i0 + theta.delta1) - eps.cdf(i0);
}

double fitted_spearman(const FitResult& fit) {
  return copula::spearman_rho(DependenceParam(fit.spec().copula, fit.theta_hat.rho));
}

}  // namespace trisieve
