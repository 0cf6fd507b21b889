#include "trisieve/identlab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "trisieve/numerics.hpp"

namespace trisieve {

double DemoDependence::cdf(double u, double v) const {
  if (comonotone) {
    return copula::comonotone_cdf(u, v);
  }
  return copula::cdf(DependenceParam(family, rho), u, v);
}

void BinaryParameterSet::validate() const {
  for (double v : {t0, t1, q0, q1}) {
    if (!(v > 0.0 && v < 1.0)) {
      throw std::invalid_argument("binary parameter set: t and q must lie in (0,1)");
    }
  }
  for (double t : {t0, t1}) {
    const double r1 = t + delta1;
    if (!(r1 >= 0.0 && r1 <= 1.0)) {
      throw std::invalid_argument("binary parameter set: t + delta1 must lie in [0,1]");
    }
  }
}

CellProbs BinaryParameterSet::cells(int x) const {
  const double t = x == 0 ? t0 : t1;
  const double q = x == 0 ? q0 : q1;
  const double r0 = t;
  const double r1 = t + delta1;
  return assemble_cells(r0, q, dependence.cdf(r1, q), dependence.cdf(r0, q));
}

BinaryCounterexample BinaryCounterexample::paper() {
  BinaryCounterexample ex;
  ex.a = {1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0, 0.0, {CopulaFamily::Gaussian, 0.0, false}};
  ex.b = {5.0 / 9.0, 8.0 / 9.0, 1.0 / 3.0, 2.0 / 3.0, -4.0 / 9.0, {CopulaFamily::Gaussian, 0.0, true}};
  return ex;
}

CounterexampleReport verify_binary_counterexample(const BinaryCounterexample& example) {
  example.a.validate();
  example.b.validate();
  CounterexampleReport rep;
  for (int x = 0; x < 2; ++x) {
    const CellProbs pa = example.a.cells(x);
    const CellProbs pb = example.b.cells(x);
    rep.cells[static_cast<std::size_t>(x)] = {pa, pb};
    for (int y = 0; y < 2; ++y) {
      for (int d = 0; d < 2; ++d) {
        rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(pa.get(y, d) - pb.get(y, d)));
      }
    }
  }
  return rep;
}

double failure_t_star(double q, double t) { return q + (1.0 - q) * t; }

double failure_s_dagger(double q, double t) { return q * t; }

double FailureDistribution::cdf(double v) const {
  // Beyond the knots E is held at its end value.
  const std::size_t m = y.size();
  if (m < 2) {
    throw std::logic_error("failure distribution is empty");
  }
  if (v <= y.front()) {
    const double z = numerics::norm_quantile(F.front()) + (v - y.front());
    return numerics::norm_cdf(z);
  }
  if (v >= y.back()) {
    const double z = numerics::norm_quantile(F.back()) + (v - y.back());
    return numerics::norm_cdf(z);
  }
  const auto it = std::upper_bound(y.begin(), y.end(), v);
  const auto j = static_cast<std::size_t>(it - y.begin()) - 1;
  const double w = (v - y[j]) / (y[j + 1] - y[j]);
  const double z0 = numerics::norm_quantile(F[j]);
  const double z1 = numerics::norm_quantile(F[j + 1]);
  return numerics::norm_cdf(z0 + w * (z1 - z0));
}

FailureDistribution solve_failure_distribution(const std::function<double(double)>& q_of_x,
                                               const std::function<double(double)>& t_of_x,
                                               const FailureOptions& o) {
  if (o.grid_points < 2 || o.knots < 3 || !(o.damping > 0.0 && o.damping <= 1.0)) {
    throw std::invalid_argument("solve_failure_distribution: bad options");
  }
  const int N = o.grid_points;
  const int m = o.knots;
  const double h = 2.0 * o.knot_half_width / (m - 1);
  auto knot = [&](int k) { return -o.knot_half_width + k * h; };

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, m + 1);
  Eigen::VectorXd c(N);
  auto add_interp = [&](int row, double z, double sign) {
    const double pos = (z + o.knot_half_width) / h;
    const int j = std::clamp(static_cast<int>(std::floor(pos)), 0, m - 2);
    const double w = pos - j;
    A(row, j) += sign * (1.0 - w);
    A(row, j + 1) += sign * w;
  };
  for (int i = 0; i < N; ++i) {
    const double x = -o.grid_half_width + 2.0 * o.grid_half_width * i / (N - 1);
    const double q = q_of_x(x);
    const double t = t_of_x(x);
    if (!(q > 0.0 && q < 1.0 && t > 0.0 && t < 1.0)) {
      throw std::invalid_argument("solve_failure_distribution: q and t must lie in (0,1) on the grid");
    }
    const double za = numerics::norm_quantile(failure_s_dagger(q, t));
    const double zb = numerics::norm_quantile(failure_t_star(q, t));
    if (std::abs(za) >= o.knot_half_width || std::abs(zb) >= o.knot_half_width) {
      throw std::invalid_argument("solve_failure_distribution: normal scores fall outside the knot range");
    }
    add_interp(i, za, 1.0);
    add_interp(i, zb, -1.0);
    A(i, m) = -1.0;
    c[i] = zb - za;
  }

  // Metric: curvature of E plus a ridge, and a tiny penalty on delta1*.
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (int k = 0; k + 2 < m; ++k) {
    const double d[3] = {1.0, -2.0, 1.0};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        R(k + a, k + b) += o.smoothness * d[a] * d[b] / (h * h * h);
      }
    }
  }
  for (int k = 0; k < m; ++k) {
    R(k, k) += o.ridge * h;
  }
  R(m, m) = o.delta_penalty;
  const Eigen::LLT<Eigen::MatrixXd> Rf(R);
  if (Rf.info() != Eigen::Success) {
    throw NumericalError("solve_failure_distribution: metric is not positive definite");
  }
  const Eigen::MatrixXd RiAt = Rf.solve(A.transpose());
  const Eigen::MatrixXd S = A * RiAt;
  const Eigen::LDLT<Eigen::MatrixXd> Sf(S);
  if (Sf.info() != Eigen::Success) {
    throw NumericalError("solve_failure_distribution: constraint system is singular");
  }

  FailureDistribution out;
  Eigen::VectorXd sol = Eigen::VectorXd::Zero(m + 1);
  Eigen::VectorXd r = c - A * sol;
  out.residual = r.cwiseAbs().maxCoeff();
  out.residual_history.push_back(out.residual);
  while (out.residual >= o.tolerance && out.iterations < o.max_iter) {
    sol += o.damping * (RiAt * Sf.solve(r));
    r = c - A * sol;
    out.residual = r.cwiseAbs().maxCoeff();
    out.residual_history.push_back(out.residual);
    ++out.iterations;
  }
  out.converged = out.residual < o.tolerance;
  out.delta1_star = sol[m];
  out.y.resize(static_cast<std::size_t>(m));
  out.F.resize(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    out.y[static_cast<std::size_t>(k)] = knot(k) + sol[k];
    out.F[static_cast<std::size_t>(k)] = numerics::norm_cdf(knot(k));
  }
  out.strictly_increasing = true;
  for (int k = 0; k + 1 < m; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (!(out.y[kk + 1] > out.y[kk]) || !(out.F[kk + 1] > out.F[kk])) {
      out.strictly_increasing = false;
    }
  }
  if (!out.converged) {
    std::ostringstream msg;
    msg << "solve_failure_distribution: residual " << out.residual << " after " << out.iterations
        << " iterations";
    throw NumericalError(msg.str());
  }
  if (out.strictly_increasing) {
    for (int i = 0; i <= 600; ++i) {
      const double v = -3.0 + i * 0.01;
      out.sup_deviation = std::max(out.sup_deviation, std::abs(out.cdf(v) - numerics::norm_cdf(v)));
    }
  }
  return out;
}

FailureDistribution solve_failure_distribution(const FailureOptions& options) {
  const auto phi = [](double x) { return numerics::norm_cdf(x); };
  return solve_failure_distribution(phi, phi, options);
}

copula::SiReport positivity_scan(CopulaFamily family, const std::vector<double>& rho_grid,
                         const std::vector<double>& u_grid) {
  return copula::si_ordering_scan(family, rho_grid, u_grid);
}

std::vector<double> interior_unit_grid(int points) {
  std::vector<double> g;
  for (int k = 0; k < points; ++k) {
    g.push_back((k + 1.0) / (points + 1.0));
  }
  return g;
}

std::vector<double> default_rho_grid(CopulaFamily family, int count) {
  double lo = 0.0;
  double hi = 0.0;
  switch (family) {
    case CopulaFamily::Gaussian:
      lo = -0.9;
      hi = 0.9;
      break;
    case CopulaFamily::Frank:
      lo = -10.0;
      hi = 10.0;
      break;
    case CopulaFamily::Clayton:
      lo = 0.25;
      hi = 10.0;
      break;
    case CopulaFamily::Gumbel:
      lo = 1.1;
      hi = 10.0;
      break;
  }
  std::vector<double> g;
  for (int k = 0; k < count; ++k) {
    double v = count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (count - 1);
    // The Frank grid skips the independence point.
    if (family == CopulaFamily::Frank && v == 0.0) {
      v = 0.5;
    }
    g.push_back(v);
  }
  return g;
}

}  // namespace trisieve
