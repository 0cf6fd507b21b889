#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "trisieve/likelihood.hpp"
#include "trisieve/numerics.hpp"
#include "trisieve/rng.hpp"

using namespace trisieve;

namespace {

struct Case {
  const char* name;
  ModelSpec spec;
};

std::vector<Case> cases() {
  std::vector<Case> out;
  for (CopulaFamily f : kAllCopulaFamilies) {
    ModelSpec fixed;
    fixed.copula = f;
    out.push_back({"fixed", fixed});
    ModelSpec ls;
    ls.copula = f;
    ls.eps = MarginalSpec::location_scale();
    ls.nu = MarginalSpec::location_scale(TransformG(TransformKind::Logistic));
    ls.normalization = testing::pin_first();
    out.push_back({"location-scale", ls});
    ModelSpec sv;
    sv.copula = f;
    sv.eps = MarginalSpec::sieve(TransformG(), 2);
    sv.nu = MarginalSpec::sieve(TransformG(TransformKind::StudentT3), 3);
    sv.normalization = testing::pin_first();
    out.push_back({"sieve", sv});
  }
  return out;
}

Dataset small_dataset(std::size_t n, std::uint64_t seed) {
  Dgp g = testing::basic_dgp();
  g.alpha = Eigen::Vector2d(-1.0, 0.4);
  g.beta = Eigen::Vector2d(-1.0, 0.3);
  g.covariate_corr = Eigen::MatrixXd::Identity(3, 3);
  return simulate_dataset(g, n, seed, 0);
}

}  // namespace

TEST_SUITE("likelihood") {
  TEST_CASE("cell assembly at independence") {
    const double r1 = numerics::norm_cdf(1.1);
    const CellProbs c = assemble_cells(0.5, 0.5, r1 * 0.5, 0.25);
    CHECK(c.p11 == doctest::Approx(0.43216).epsilon(1e-5));
    CHECK(c.p10 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(c.p01 == doctest::Approx(0.06784).epsilon(1e-4));
    CHECK(c.p00 == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(c.sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.get(1, 1) == c.p11);
    CHECK(c.get(0, 0) == c.p00);
  }

  TEST_CASE("delta1 = 0 collapses the treated cell") {
    const DependenceParam p(CopulaFamily::Frank, 3.0);
    const double r0 = 0.35;
    const double s = 0.6;
    const CellProbs c = assemble_cells(r0, s, copula::cdf(p, r0, s), copula::cdf(p, r0, s));
    CHECK(c.p11 == doctest::Approx(copula::cdf(p, r0, s)).epsilon(1e-14));
    CHECK(c.p11 + c.p01 == doctest::Approx(s).epsilon(1e-14));
  }

  TEST_CASE("floors keep every cell positive") {
    const CellProbs c = assemble_cells(0.5, 0.5, 0.5, 0.25);
    CHECK(c.p01 > 0.0);
    CHECK(c.sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c.p01 >= kProbFloor * 0.5);
  }

  TEST_CASE("one observation with probability 1/4") {
    Dataset d;
    d.y = Eigen::VectorXi::Constant(1, 1);
    d.d = Eigen::VectorXi::Constant(1, 0);
    d.x = Eigen::MatrixXd::Zero(1, 1);
    d.z = Eigen::MatrixXd::Zero(1, 1);
    d.x_names = {"x1"};
    d.z_names = {"z1"};
    ModelSpec spec;
    const ParameterMap map(spec, 1, 1);
    const Eigen::VectorXd free = map.pack(map.default_theta());
    CHECK(loglik(map, free, d) == doctest::Approx(std::log(0.25)).epsilon(1e-12));
    CHECK(loglik(map, free, d) == doctest::Approx(-1.38629).epsilon(1e-5));
  }

  TEST_CASE("weights") {
    const Dataset data = small_dataset(60, 4);
    ModelSpec spec;
    spec.copula = CopulaFamily::Gaussian;
    const ParameterMap map(spec, data.kx(), data.kz());
    Eigen::VectorXd free = map.pack(map.default_theta());
    free.setConstant(0.1);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(data.n());
    CHECK(loglik(map, free, data, &ones) == loglik(map, free, data));
    const Eigen::VectorXd twos = Eigen::VectorXd::Constant(data.n(), 2.0);
    CHECK(loglik(map, free, data, &twos) == doctest::Approx(2.0 * loglik(map, free, data)).epsilon(1e-14));
    Eigen::VectorXd bad = ones;
    bad[3] = 0.0;
    CHECK_THROWS_AS(loglik(map, free, data, &bad), std::invalid_argument);
  }

  TEST_CASE("analytic gradient matches central differences") {
    const Dataset data = small_dataset(50, 8);
    RngStream rng(77);
    for (const auto& c : cases()) {
      CAPTURE(c.name);
      CAPTURE(to_string(c.spec.copula));
      const ParameterMap map(c.spec, data.kx(), data.kz());
      const Eigen::VectorXd lo = map.lower_bounds();
      const Eigen::VectorXd hi = map.upper_bounds();
      for (int trial = 0; trial < 3; ++trial) {
        Eigen::VectorXd free = map.pack(map.default_theta());
        for (Eigen::Index k = 0; k < free.size(); ++k) {
          free[k] = std::clamp(free[k] + 0.4 * rng.normal(), lo[k] + 0.1, hi[k] - 0.1);
        }
        const LoglikEval ev = evaluate_loglik(map, free, data, nullptr, true, true);
        const Eigen::VectorXd fd =
            testing::fd_gradient([&](const Eigen::VectorXd& v) { return loglik(map, v, data); }, free, 1e-6);
        const double rel = (ev.grad - fd).cwiseAbs().maxCoeff() / (1.0 + fd.cwiseAbs().maxCoeff());
        CHECK(rel < 1e-5);
        const Eigen::VectorXd mean_score = ev.scores.colwise().mean().transpose();
        CHECK((mean_score - ev.grad).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(ev.value == doctest::Approx(loglik(map, free, data)).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("gradient stays finite near the floor and vanishes in the far tail") {
    Dataset d;
    d.y = Eigen::VectorXi::Constant(1, 1);
    d.d = Eigen::VectorXi::Constant(1, 1);
    d.x = Eigen::MatrixXd::Constant(1, 1, 1.0);
    d.z = Eigen::MatrixXd::Zero(1, 1);
    d.x_names = {"x1"};
    d.z_names = {"z1"};
    ModelSpec spec;
    const ParameterMap map(spec, 1, 1);
    Theta th = map.default_theta();
    th.beta[0] = 40.0;
    th.delta1 = 5.0;
    const Eigen::VectorXd g = loglik_grad(map, map.pack(th), d);
    CHECK(g.allFinite());
    CHECK(std::abs(g[map.delta1_index()]) < 1e-12);
    th.beta[0] = -45.0;
    th.delta1 = 0.0;
    const Eigen::VectorXd g2 = loglik_grad(map, map.pack(th), d);
    CHECK(g2.allFinite());
  }

  TEST_CASE("cell probabilities for a fitted point") {
    ModelSpec spec;
    const ParameterMap map(spec, 1, 1);
    Theta th = map.default_theta();
    th.delta1 = 1.1;
    const CellProbs c = cell_probs(spec, th, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1));
    CHECK(c.p11 == doctest::Approx(0.5 * numerics::norm_cdf(1.1)).epsilon(1e-12));
    CHECK(c.sum() == doctest::Approx(1.0).epsilon(1e-15));
  }
}
