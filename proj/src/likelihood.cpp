#include "trisieve/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "trisieve/numerics.hpp"

namespace trisieve {

namespace {

// Copula arguments are kept this far inside (0,1) so partials stay finite.
constexpr double kUnitMargin = 1e-15;

double clamp_unit(double u) { return std::clamp(u, kUnitMargin, 1.0 - kUnitMargin); }

}  // namespace

double CellProbs::get(int y, int d) const {
  if (y == 1) {
    return d == 1 ? p11 : p10;
  }
  return d == 1 ? p01 : p00;
}

CellProbs assemble_cells(double r0, double s, double c_r1s, double c_r0s) {
  CellProbs c;
  c.p11 = std::max(c_r1s, kProbFloor);
  c.p10 = std::max(r0 - c_r0s, kProbFloor);
  c.p01 = std::max(s - c_r1s, kProbFloor);
  c.p00 = std::max(1.0 - r0 - s + c_r0s, kProbFloor);
  const double total = c.sum();
  c.p11 /= total;
  c.p10 /= total;
  c.p01 /= total;
  c.p00 /= total;
  return c;
}

CellProbs cell_probs(const ModelSpec& spec, const Theta& theta, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& z) {
  if (x.size() != theta.beta.size() || x.size() != theta.alpha.size() || z.size() != theta.gamma.size()) {
    throw std::invalid_argument("cell_probs: covariate dimensions do not match theta");
  }
  const MarginalModel eps(spec.eps, theta.eps);
  const MarginalModel nu(spec.nu, theta.nu);
  const DependenceParam dep(spec.copula, theta.rho);
  const double iy0 = theta.beta0 + x.dot(theta.beta);
  const double idd = theta.alpha0 + x.dot(theta.alpha) + z.dot(theta.gamma);
  const double r0 = clamp_unit(eps.cdf(iy0));
  const double r1 = clamp_unit(eps.cdf(iy0 + theta.delta1));
  const double s = clamp_unit(nu.cdf(idd));
  return assemble_cells(r0, s, copula::cdf(dep, r1, s), copula::cdf(dep, r0, s));
}

LoglikEval evaluate_loglik(const ParameterMap& map, const Eigen::VectorXd& free, const Dataset& data,
                           const Eigen::VectorXd* weights, bool want_grad, bool want_scores) {
  const Eigen::Index n = data.n();
  if (data.kx() != map.kx() || data.kz() != map.kz()) {
    throw std::invalid_argument("loglik: dataset dimensions do not match the model");
  }
  if (n < 1) {
    throw std::invalid_argument("loglik: empty dataset");
  }
  if (weights != nullptr) {
    if (weights->size() != n) {
      throw std::invalid_argument("loglik: weight vector length differs from n");
    }
    if (!((weights->array() > 0.0).all()) || !weights->allFinite()) {
      throw std::invalid_argument("loglik: weights must be positive and finite");
    }
  }
  const ModelSpec& spec = map.spec();
  const Theta theta = map.unpack(free);
  const MarginalModel eps(spec.eps, theta.eps);
  const MarginalModel nu(spec.nu, theta.nu);
  const DependenceParam dep(spec.copula, theta.rho);
  const Eigen::Index p = map.size();
  const bool grad_needed = want_grad || want_scores;
  const double drho_dt = copula::dnative_dunconstrained(spec.copula, free[map.rho_index()]);

  const int ne = eps.free_count();
  const int nn = nu.free_count();
  const Eigen::Index eps_start = map.psi_size();
  const Eigen::Index nu_start = eps_start + ne;

  std::vector<double> terms(static_cast<std::size_t>(n));
  Eigen::MatrixXd scores;
  if (grad_needed) {
    scores.resize(n, p);
  }
  std::vector<double> eps_grad(static_cast<std::size_t>(std::max(ne, 1)));
  std::vector<double> nu_grad(static_cast<std::size_t>(std::max(nn, 1)));
  const auto& params = map.params();

  for (Eigen::Index i = 0; i < n; ++i) {
    const int y = data.y[i];
    const int d = data.d[i];
    const auto xi = data.x.row(i);
    const auto zi = data.z.row(i);
    const double iy0 = theta.beta0 + xi.dot(theta.beta);
    const double iy1 = iy0 + theta.delta1;
    const double idd = theta.alpha0 + xi.dot(theta.alpha) + zi.dot(theta.gamma);

    // Marginal at the index used by the observed cell gets derivatives.
    const double iy_obs = d == 1 ? iy1 : iy0;
    const double iy_other = d == 1 ? iy0 : iy1;
    double F_obs = 0.0;
    double f_obs = 0.0;
    double F_other = 0.0;
    double f_other = 0.0;
    double Fs = 0.0;
    double fs = 0.0;
    eps.eval(iy_obs, F_obs, f_obs, grad_needed && ne > 0 ? eps_grad.data() : nullptr);
    eps.eval(iy_other, F_other, f_other, nullptr);
    nu.eval(idd, Fs, fs, grad_needed && nn > 0 ? nu_grad.data() : nullptr);

    const double r_obs = clamp_unit(F_obs);
    const double r_other = clamp_unit(F_other);
    const double s = clamp_unit(Fs);
    const CopulaValues cv = copula::evaluate(dep, r_obs, s);
    const double c_other = copula::cdf(dep, r_other, s);
    const double r0 = d == 1 ? r_other : r_obs;
    const double c_r1s = d == 1 ? cv.c : c_other;
    const double c_r0s = d == 1 ? c_other : cv.c;
    const CellProbs cells = assemble_cells(r0, s, c_r1s, c_r0s);
    const double prob = cells.get(y, d);
    terms[static_cast<std::size_t>(i)] = std::log(prob);

    if (!grad_needed) {
      continue;
    }
    // dp = a_r dr + a_s ds + a_rho drho for the observed cell.
    double a_r = 0.0;
    double a_s = 0.0;
    double a_rho = 0.0;
    if (d == 1 && y == 1) {
      a_r = cv.c1;
      a_s = cv.c2;
      a_rho = cv.crho;
    } else if (d == 1 && y == 0) {
      a_r = -cv.c1;
      a_s = 1.0 - cv.c2;
      a_rho = -cv.crho;
    } else if (d == 0 && y == 1) {
      a_r = 1.0 - cv.c1;
      a_s = -cv.c2;
      a_rho = -cv.crho;
    } else {
      a_r = cv.c1 - 1.0;
      a_s = cv.c2 - 1.0;
      a_rho = cv.crho;
    }
    const double inv_p = 1.0 / prob;
    const double kr = a_r * f_obs * inv_p;
    const double ks = a_s * fs * inv_p;
    for (Eigen::Index j = 0; j < p; ++j) {
      const FreeParam& fp = params[static_cast<std::size_t>(j)];
      double g = 0.0;
      switch (fp.role) {
        case ParamRole::Alpha0:
          g = ks;
          break;
        case ParamRole::Alpha:
          g = ks * xi[fp.index];
          break;
        case ParamRole::Beta0:
          g = kr;
          break;
        case ParamRole::Beta:
          g = kr * xi[fp.index];
          break;
        case ParamRole::Delta1:
          g = d == 1 ? kr : 0.0;
          break;
        case ParamRole::Gamma:
          g = ks * zi[fp.index];
          break;
        case ParamRole::Rho:
          g = a_rho * drho_dt * inv_p;
          break;
        case ParamRole::EpsMu:
        case ParamRole::EpsLogSigma:
        case ParamRole::EpsSieve:
          g = a_r * eps_grad[static_cast<std::size_t>(j - eps_start)] * inv_p;
          break;
        case ParamRole::NuMu:
        case ParamRole::NuLogSigma:
        case ParamRole::NuSieve:
          g = a_s * nu_grad[static_cast<std::size_t>(j - nu_start)] * inv_p;
          break;
      }
      scores(i, j) = g;
    }
  }

  LoglikEval out;
  if (weights != nullptr) {
    for (Eigen::Index i = 0; i < n; ++i) {
      terms[static_cast<std::size_t>(i)] *= (*weights)[i];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  out.value = numerics::pairwise_sum(terms) * inv_n;
  if (want_grad) {
    out.grad.resize(p);
    std::vector<double> col(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < p; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        col[static_cast<std::size_t>(i)] = weights != nullptr ? (*weights)[i] * scores(i, j) : scores(i, j);
      }
      out.grad[j] = numerics::pairwise_sum(col) * inv_n;
    }
  }
  if (want_scores) {
    out.scores = std::move(scores);
  }
  return out;
}

double loglik(const ParameterMap& map, const Eigen::VectorXd& free, const Dataset& data,
              const Eigen::VectorXd* weights) {
  return evaluate_loglik(map, free, data, weights, false, false).value;
}

Eigen::VectorXd loglik_grad(const ParameterMap& map, const Eigen::VectorXd& free, const Dataset& data,
                            const Eigen::VectorXd* weights) {
  return evaluate_loglik(map, free, data, weights, true, false).grad;
}

}  // namespace trisieve
