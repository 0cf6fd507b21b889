#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "trisieve/numerics.hpp"
#include "trisieve/simulation.hpp"

using namespace trisieve;

TEST_SUITE("simulation") {
  TEST_CASE("comonotone latent draws share ranks") {
    Dgp g = testing::basic_dgp();
    g.comonotone = true;
    g.eps = calibrate_mixture(0.1066, 1.1);
    Eigen::MatrixXd latent;
    simulate_dataset(g, 500, 1, 0, &latent);
    std::vector<double> e(latent.col(0).data(), latent.col(0).data() + latent.rows());
    std::vector<double> v(latent.col(1).data(), latent.col(1).data() + latent.rows());
    CHECK(testing::ranks(e) == testing::ranks(v));
  }

  TEST_CASE("treatment share matches quadrature") {
    Dgp g = testing::basic_dgp();
    g.alpha[0] = 0.6;
    g.gamma[0] = 0.9;
    g.nu = ParametricMarginal::normal(0.4, 1.3);
    const Dataset data = simulate_dataset(g, 100000, 2, 0);
    const double share = data.d.cast<double>().mean();
    // E[Phi((x a + z c - mu) / s)] over the bivariate normal covariates, by a product midpoint rule.
    const double r = g.covariate_corr(0, 1);
    const int m = 600;
    const double L = 8.0;
    const double h = 2.0 * L / m;
    double q = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const double x = -L + (i + 0.5) * h;
        const double z = -L + (j + 0.5) * h;
        q += numerics::bvn_pdf(x, z, r) * numerics::norm_cdf((0.6 * x + 0.9 * z - 0.4) / 1.3) * h * h;
      }
    }
    CHECK(std::abs(share - q) < 0.01);
  }

  TEST_CASE("latent dependence matches the target Spearman rho") {
    for (CopulaFamily f : kAllCopulaFamilies) {
      Eigen::MatrixXd latent;
      simulate_dataset(testing::basic_dgp(f, 0.5), 100000, 3, 0, &latent);
      std::vector<double> e(latent.col(0).data(), latent.col(0).data() + latent.rows());
      std::vector<double> v(latent.col(1).data(), latent.col(1).data() + latent.rows());
      CHECK(std::abs(testing::spearman_sample(e, v) - 0.5) < 0.02);
    }
  }

  TEST_CASE("datasets depend only on (seed, replication)") {
    const Scenario s = make_preset("table1-frank");
    const Dataset a = simulate_dataset(s, 4);
    const Dataset b = simulate_dataset(s, 4);
    const Dataset c = simulate_dataset(s, 5);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.x != c.x);
    CHECK(a.n() == 500);
  }

  TEST_CASE("summary statistics") {
    const McCell one = summarize_column({0.7}, 0.8);
    CHECK(one.sd == 0.0);
    CHECK(one.rmse == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(one.bias == doctest::Approx(-0.1).epsilon(1e-12));
    const McCell c = summarize_column({0.1, 0.4, 0.35, 0.9, 0.2}, 0.3);
    CHECK(c.mean == doctest::Approx(0.39));
    CHECK(c.rmse * c.rmse == doctest::Approx(c.sd * c.sd + c.bias * c.bias).epsilon(1e-12));
    CHECK(c.replications == 5);
  }

  TEST_CASE("presets") {
    const auto names = preset_names();
    CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
    for (const auto& n : names) {
      CAPTURE(n);
      const Scenario s = make_preset(n);
      CHECK_NOTHROW(s.validate());
      CHECK(s.id == n);
    }
    for (const auto& n : coverage_preset_names()) {
      CHECK_NOTHROW(make_coverage_preset(n).scenario.validate());
    }
    CHECK_THROWS_AS(make_preset("table9-gaussian"), std::invalid_argument);
    CHECK_THROWS_AS(make_coverage_preset("cp-none"), std::invalid_argument);
    const Scenario t1 = make_preset("table1-gaussian");
    CHECK(std::abs(t1.dgp.true_ate(t1.ate_point()) - 0.3643) < 5e-4);
    const Scenario t2 = make_preset("table2-gaussian");
    CHECK(std::abs(t2.dgp.true_ate(t2.ate_point()) - 0.1066) < 5e-4);
    const Scenario t2s = make_preset("table2std-gaussian");
    CHECK(std::abs(t2s.dgp.true_ate(t2s.ate_point()) - 0.1066) < 5e-4);
    CHECK(make_preset("cop2").models.size() == 6);
  }

  TEST_CASE("Monte Carlo runs do not depend on the thread count") {
    Scenario s = make_preset("table1-clayton");
    s.replications = 4;
    s.threads = 1;
    const McSummary a = run_monte_carlo(s);
    s.threads = 3;
    const McSummary b = run_monte_carlo(s);
    CHECK(a.failures == 0);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t k = 0; k < a.cells.size(); ++k) {
      CHECK(a.cells[k].mean == b.cells[k].mean);
      CHECK(a.cells[k].sd == b.cells[k].sd);
    }
    CHECK(a.estimates[1] == b.estimates[1]);
    CHECK(a.sieve_orders == std::vector<int>{0, 2});
    CHECK(a.cell("sieve-clayton", "ATE").truth == doctest::Approx(0.3643).epsilon(1e-3));
    CHECK_THROWS(a.cell("sieve-clayton", "beta"));
  }

  TEST_CASE("invalid scenarios") {
    Scenario s = make_preset("table1-gaussian");
    s.models.clear();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = make_preset("table1-gaussian");
    s.dgp.covariate_corr(0, 1) = 1.5;
    s.dgp.covariate_corr(1, 0) = 1.5;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = make_preset("table1-gaussian");
    s.ate_x = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  }
}
