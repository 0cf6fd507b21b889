#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "trisieve/inference.hpp"
#include "trisieve/likelihood.hpp"
#include "trisieve/parallel.hpp"
#include "trisieve/rng.hpp"

using namespace trisieve;

namespace {

ModelSpec parametric_ls() {
  ModelSpec s;
  s.eps = MarginalSpec::location_scale();
  s.nu = MarginalSpec::location_scale();
  s.normalization = testing::pin_first();
  return s;
}

ModelSpec sieve_spec(int k) {
  ModelSpec s;
  s.eps = MarginalSpec::sieve(TransformG(), k);
  s.nu = MarginalSpec::sieve(TransformG(), k);
  s.normalization = testing::pin_first();
  return s;
}

double mc_sd(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) {
    m += x;
  }
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) {
    s += (x - m) * (x - m);
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

TEST_SUITE("inference") {
  TEST_CASE("ATE derivative matches finite differences") {
    RngStream rng(31);
    for (const ModelSpec& spec : {parametric_ls(), sieve_spec(2), sieve_spec(3)}) {
      const ParameterMap map(spec, 1, 1);
      Eigen::VectorXd free = map.pack(map.default_theta());
      for (Eigen::Index k = 0; k < free.size(); ++k) {
        free[k] += 0.3 * rng.normal();
      }
      free[map.delta1_index()] = 1.1;
      const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.2);
      auto value = [&](const Eigen::VectorXd& f) { return ate(map.spec(), map.unpack(f), x); };
      const Eigen::VectorXd g = ate_gradient(map, free, x);
      for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd v(free.size());
        for (Eigen::Index k = 0; k < v.size(); ++k) {
          v[k] = rng.normal();
        }
        const double t = 1e-5;
        const double fd = (value(free + t * v) - value(free - t * v)) / (2.0 * t);
        const double an = ate_directional_derivative(map, free, x, v);
        CHECK(an == doctest::Approx(g.dot(v)).epsilon(1e-12));
        CHECK(std::abs(an - fd) / std::max(1e-3, std::abs(fd)) < 1e-4);
      }
      // On the delta1 = 0 slice the ATE is identically zero.
      Eigen::VectorXd f0 = free;
      f0[map.delta1_index()] = 0.0;
      Eigen::VectorXd v = Eigen::VectorXd::Ones(free.size());
      v[map.delta1_index()] = 0.0;
      CHECK(std::abs(ate_directional_derivative(map, f0, x, v)) < 1e-14);
    }
  }

  TEST_CASE("efficient score projection") {
    const Dataset data = simulate_dataset(testing::basic_dgp(), 800, 12, 0);
    const FitResult fit = fit_sieve(data, sieve_spec(2));
    const EfficientScoreFit es = efficient_score_variance(fit, data);
    CHECK(es.nuisance_dim == 4);
    CHECK(es.max_orthogonality < 1e-8);
    CHECK(es.min_eigenvalue > 0.0);
    CHECK(static_cast<Eigen::Index>(es.names.size()) == fit.map.psi_size());
    CHECK((es.covariance - es.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index k = 0; k < es.se.size(); ++k) {
      CHECK(es.se[k] == doctest::Approx(std::sqrt(es.covariance(k, k))).epsilon(1e-12));
    }
  }

  TEST_CASE("without nuisance directions I* is the score outer product") {
    const Dataset data = simulate_dataset(testing::basic_dgp(), 600, 13, 0);
    ModelSpec spec;
    const FitResult fit = fit_parametric(data, spec);
    const EfficientScoreFit es = efficient_score_variance(fit, data);
    CHECK(es.nuisance_dim == 0);
    const LoglikEval ev = evaluate_loglik(fit.map, fit.free_hat, data, nullptr, false, true);
    Eigen::MatrixXd s = ev.scores;
    const auto r = fit.map.rho_index();
    s.col(r) /= copula::dnative_dunconstrained(spec.copula, fit.free_hat[r]);
    const Eigen::MatrixXd opg = s.transpose() * s / static_cast<double>(data.n());
    CHECK((es.I_star_hat - opg).cwiseAbs().maxCoeff() < 1e-10 * (1.0 + opg.cwiseAbs().maxCoeff()));
  }

  TEST_CASE("ATE variance") {
    const Dataset data = simulate_dataset(testing::basic_dgp(), 800, 14, 0);
    const FitResult fit = fit_parametric(data, parametric_ls());
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    const AteVariance av = ate_variance(fit, data, x);
    CHECK(av.ate == doctest::Approx(ate(fit.spec(), fit.theta_hat, x)).epsilon(1e-14));
    CHECK(av.sigma2 > 0.0);
    CHECK(av.se == doctest::Approx(std::sqrt(av.sigma2 / 800.0)).epsilon(1e-12));
    // The maximizing direction attains the supremum.
    const double d = ate_directional_derivative(fit.map, fit.free_hat, x, av.maximizer);
    CHECK(d * d == doctest::Approx(av.sigma2).epsilon(1e-8));
  }

  TEST_CASE("bootstrap weights") {
    const Eigen::VectorXd e = bootstrap_weights(BootstrapWeights::Exponential, 200000, 5, 0);
    CHECK(std::abs(e.mean() - 1.0) < 0.01);
    CHECK((e.array() > 0.0).all());
    const Eigen::VectorXd l = bootstrap_weights(BootstrapWeights::LogNormal, 200000, 5, 1);
    CHECK(std::abs(l.mean() - 1.0) < 0.01);
    CHECK(std::abs((l.array() - l.mean()).square().mean() - 1.0) < 0.05);
    CHECK(bootstrap_weights(BootstrapWeights::Unit, 10, 5, 0) == Eigen::VectorXd::Ones(10));
    CHECK(bootstrap_weights(BootstrapWeights::Exponential, 50, 5, 3) ==
          bootstrap_weights(BootstrapWeights::Exponential, 50, 5, 3));
    CHECK(bootstrap_weights(BootstrapWeights::Exponential, 50, 5, 3) !=
          bootstrap_weights(BootstrapWeights::Exponential, 50, 5, 4));
  }

  TEST_CASE("order statistics") {
    std::vector<double> v;
    for (int i = 200; i >= 1; --i) {
      v.push_back(i);
    }
    CHECK(order_statistic(v, 0.025) == 5.0);
    CHECK(order_statistic(v, 0.975) == 195.0);
    CHECK(order_statistic(v, 0.0) == 1.0);
    CHECK(order_statistic(v, 1.0) == 200.0);
    CHECK(order_statistic({3.0}, 0.5) == 3.0);
  }

  TEST_CASE("unit weights reproduce the point estimate") {
    const Dataset data = simulate_dataset(testing::basic_dgp(), 400, 15, 0);
    const FitResult fit = fit_parametric(data, parametric_ls());
    BootstrapOptions o;
    o.B = 8;
    o.weights = BootstrapWeights::Unit;
    o.threads = 1;
    const std::vector<Target> targets{Target::gamma(0, "gamma"), Target::delta1(), Target::ate(Eigen::VectorXd::Zero(1))};
    const BootstrapResult br = weighted_bootstrap(data, fit, targets, o);
    CHECK(br.failures == 0);
    for (Eigen::Index t = 0; t < 3; ++t) {
      CHECK(br.se[t] == doctest::Approx(0.0));
      CHECK(std::abs(br.pci[t][0].lower - br.point[t]) < 1e-12);
      CHECK(std::abs(br.pci[t][0].upper - br.point[t]) < 1e-12);
    }
  }

  TEST_CASE("percentile intervals are order statistics; runs do not depend on threads") {
    const Dataset data = simulate_dataset(testing::basic_dgp(), 400, 16, 0);
    const FitResult fit = fit_parametric(data, parametric_ls());
    BootstrapOptions o;
    o.B = 40;
    o.seed = 77;
    o.levels = {0.9, 0.95};
    o.threads = 1;
    const std::vector<Target> targets{Target::gamma(0, "gamma"), Target::rho_spearman(),
                                      Target::ate(Eigen::VectorXd::Zero(1))};
    const BootstrapResult a = weighted_bootstrap(data, fit, targets, o);
    o.threads = 3;
    const BootstrapResult b = weighted_bootstrap(data, fit, targets, o);
    CHECK(a.estimates == b.estimates);
    CHECK(a.draw_index == b.draw_index);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      std::vector<double> col;
      for (Eigen::Index r = 0; r < a.estimates.rows(); ++r) {
        col.push_back(a.estimates(r, static_cast<Eigen::Index>(t)));
      }
      for (std::size_t l = 0; l < o.levels.size(); ++l) {
        const double p = 1.0 - o.levels[l];
        CHECK(a.pci[t][l].lower == order_statistic(col, p / 2.0));
        CHECK(a.pci[t][l].upper == order_statistic(col, 1.0 - p / 2.0));
      }
      CHECK(a.se[static_cast<Eigen::Index>(t)] == doctest::Approx(mc_sd(col)).epsilon(1e-12));
    }
  }
}

TEST_SUITE("inference-mc") {
  TEST_CASE("asymptotic SEs track the Monte Carlo spread at n = 2000") {
    const int reps = 60;
    std::vector<double> gamma(reps);
    std::vector<double> ates(reps);
    std::vector<double> se_gamma(reps);
    std::vector<double> se_ate(reps);
    const Dgp g = testing::basic_dgp();
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    parallel_for(reps, 0, [&](std::size_t r) {
      const Dataset data = simulate_dataset(g, 2000, 4242, r);
      const FitResult fit = fit_parametric(data, parametric_ls());
      const EfficientScoreFit es = efficient_score_variance(fit, data);
      const AteVariance av = ate_variance(fit, data, x);
      gamma[r] = fit.theta_hat.gamma[0];
      se_gamma[r] = es.se[fit.map.gamma_index(0)];
      ates[r] = av.ate;
      se_ate[r] = av.se;
    });
    double mg = 0.0;
    double ma = 0.0;
    for (int r = 0; r < reps; ++r) {
      mg += se_gamma[static_cast<std::size_t>(r)] / reps;
      ma += se_ate[static_cast<std::size_t>(r)] / reps;
    }
    MESSAGE("SE(gamma) mean " << mg << " vs MC SD " << mc_sd(gamma) << "; SE(ATE) " << ma << " vs " << mc_sd(ates));
    CHECK(std::abs(mg / mc_sd(gamma) - 1.0) < 0.25);
    CHECK(std::abs(ma / mc_sd(ates) - 1.0) < 0.30);
  }
}
