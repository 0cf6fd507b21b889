#include "trisieve/optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trisieve {

namespace {

Eigen::VectorXd clamp_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Zeroes components that cannot move in the ascent direction v.
void project_direction(Eigen::VectorXd& v, const Eigen::VectorXd& x, const Eigen::VectorXd& lo,
                       const Eigen::VectorXd& hi) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    if (lo[j] == hi[j] || (x[j] <= lo[j] && v[j] < 0.0) || (x[j] >= hi[j] && v[j] > 0.0)) {
      v[j] = 0.0;
    }
  }
}

}  // namespace

double projected_grad_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                           const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  Eigen::VectorXd g = grad;
  project_direction(g, x, lower, upper);
  return g.size() == 0 ? 0.0 : g.cwiseAbs().maxCoeff();
}

OptimizerResult maximize_bfgs(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                              const Eigen::VectorXd& upper, const OptimizerOptions& options) {
  const Eigen::Index p = x0.size();
  if (lower.size() != p || upper.size() != p) {
    throw std::invalid_argument("maximize_bfgs: bound dimensions differ from x0");
  }
  OptimizerResult res;
  Eigen::VectorXd x = clamp_box(x0, lower, upper);
  Eigen::VectorXd g(p);
  // Gradients of pinned coordinates are dropped so they never enter H.
  auto mask_fixed = [&](Eigen::VectorXd& v) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (lower[j] == upper[j]) {
        v[j] = 0.0;
      }
    }
  };
  double fx = f(x, &g);
  ++res.evaluations;
  mask_fixed(g);
  if (!std::isfinite(fx) || !g.allFinite()) {
    res.x = x;
    res.value = fx;
    res.grad = g;
    res.grad_norm = std::numeric_limits<double>::infinity();
    return res;
  }
  // Inverse Hessian of -f.
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(p, p);
  bool h_is_identity = true;
  bool scaled = false;
  Eigen::VectorXd xn(p);
  Eigen::VectorXd gn(p);

  for (res.iterations = 0; res.iterations < options.max_iter; ++res.iterations) {
    res.grad_norm = projected_grad_norm(x, g, lower, upper);
    if (res.grad_norm < options.tol_g) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd dir = H * g;
    project_direction(dir, x, lower, upper);
    if (!(dir.dot(g) > 0.0)) {
      H.setIdentity();
      h_is_identity = true;
      scaled = false;
      dir = g;
      project_direction(dir, x, lower, upper);
    }
    const double sup = dir.cwiseAbs().maxCoeff();
    if (sup > options.max_step) {
      dir *= options.max_step / sup;
    }
    double t = 1.0;
    bool accepted = false;
    double fn = fx;
    for (int ls = 0; ls < 60; ++ls) {
      xn = clamp_box(x + t * dir, lower, upper);
      fn = f(xn, &gn);
      ++res.evaluations;
      mask_fixed(gn);
      if (std::isfinite(fn) && gn.allFinite() && fn >= fx + 1e-4 * g.dot(xn - x)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (!h_is_identity) {
        H.setIdentity();
        h_is_identity = true;
        scaled = false;
        continue;
      }
      break;
    }
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd yv = g - gn;  // change in the gradient of -f
    const double sy = s.dot(yv);
    x = xn;
    fx = fn;
    g = gn;
    if (s.cwiseAbs().maxCoeff() == 0.0) {
      break;
    }
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      if (!scaled) {
        H = Eigen::MatrixXd::Identity(p, p) * (sy / yv.squaredNorm());
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = H * yv;
      const double yhy = yv.dot(hy);
      H += (rho * rho * yhy + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
      h_is_identity = false;
    }
  }
  res.grad_norm = projected_grad_norm(x, g, lower, upper);
  res.converged = res.grad_norm < options.tol_g;
  res.x = x;
  res.value = fx;
  res.grad = g;
  return res;
}

}  // namespace trisieve
