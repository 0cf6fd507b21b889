#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "trisieve/simulation.hpp"

namespace trisieve::testing {

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                   double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd a = x;
    Eigen::VectorXd b = x;
    a[k] += h;
    b[k] -= h;
    g[k] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

/// The one-covariate, one-instrument design with normal marginals.
inline Dgp basic_dgp(CopulaFamily family = CopulaFamily::Gaussian, double rho_sp = 0.5) {
  Dgp g;
  g.copula = family;
  g.rho_sp = rho_sp;
  g.alpha = Eigen::VectorXd::Constant(1, -1.0);
  g.beta = Eigen::VectorXd::Constant(1, -1.0);
  g.gamma = Eigen::VectorXd::Constant(1, 0.8);
  g.delta1 = 1.1;
  g.covariate_corr = Eigen::MatrixXd::Identity(2, 2);
  g.covariate_corr(0, 1) = g.covariate_corr(1, 0) = -0.1;
  return g;
}

inline Normalization pin_first() { return Normalization::fixed_coefficient({{0, -1.0}}, {{0, -1.0}}); }

/// Ranks 1..n (no ties expected for continuous draws).
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    idx[i] = i;
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    r[idx[k]] = static_cast<double>(k + 1);
  }
  return r;
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double spearman_sample(const std::vector<double>& a, const std::vector<double>& b) {
  return correlation(ranks(a), ranks(b));
}

}  // namespace trisieve::testing
