#include <doctest.h>

#include <cmath>

#include "trisieve/identlab.hpp"
#include "trisieve/numerics.hpp"

using namespace trisieve;

TEST_SUITE("identlab") {
  TEST_CASE("binary counterexample") {
    const auto ex = BinaryCounterexample::paper();
    const auto rep = verify_binary_counterexample(ex);
    CHECK(rep.max_discrepancy < 1e-14);
    const CellProbs& a0 = rep.cells[0][0];
    CHECK(a0.p11 == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(a0.p10 == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    CHECK(a0.p01 == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
    CHECK(a0.p00 == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    // A and B differ element-wise.
    CHECK(ex.a.t0 != ex.b.t0);
    CHECK(ex.a.delta1 != ex.b.delta1);
  }

  TEST_CASE("identical sets and perturbed sets") {
    auto ex = BinaryCounterexample::paper();
    BinaryCounterexample same{ex.a, ex.a};
    CHECK(verify_binary_counterexample(same).max_discrepancy == 0.0);
    ex.b.delta1 += 0.01;
    CHECK(verify_binary_counterexample(ex).max_discrepancy > 1e-3);
    ex.b.delta1 = 0.5;
    CHECK_THROWS_AS(verify_binary_counterexample(ex), std::invalid_argument);
  }

  TEST_CASE("continuous-case maps") {
    CHECK(failure_t_star(0.5, 0.5) == 0.75);
    CHECK(failure_s_dagger(0.5, 0.5) == 0.25);
    // Uniform F~ at the binary-case values gives the constant -4/9.
    const double d0 = failure_s_dagger(1.0 / 3.0, 1.0 / 3.0) - failure_t_star(1.0 / 3.0, 1.0 / 3.0);
    const double d1 = failure_s_dagger(2.0 / 3.0, 2.0 / 3.0) - failure_t_star(2.0 / 3.0, 2.0 / 3.0);
    CHECK(d0 == doctest::Approx(-4.0 / 9.0).epsilon(1e-15));
    CHECK(d1 == doctest::Approx(-4.0 / 9.0).epsilon(1e-15));
    CHECK(d0 == doctest::Approx(BinaryCounterexample::paper().b.delta1).epsilon(1e-15));
  }

  TEST_CASE("failure distribution") {
    const FailureDistribution f = solve_failure_distribution();
    CHECK(f.converged);
    CHECK(f.residual < 1e-6);
    CHECK(f.strictly_increasing);
    CHECK(f.sup_deviation > 0.0);
    CHECK(f.sup_deviation < 0.1);
    CHECK(f.residual_history.size() == static_cast<std::size_t>(f.iterations) + 1);
    for (std::size_t k = 1; k < f.residual_history.size(); ++k) {
      CHECK(f.residual_history[k] < f.residual_history[k - 1]);
    }
    // The defining restriction holds at grid points.
    for (double x : {-3.0, -0.52, 0.0, 1.2, 2.8}) {
      const double q = numerics::norm_cdf(x);
      auto inv = [&](double u) {
        double lo = -20.0;
        double hi = 20.0;
        for (int i = 0; i < 200; ++i) {
          const double mid = 0.5 * (lo + hi);
          (f.cdf(mid) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      };
      CHECK(inv(failure_s_dagger(q, q)) - inv(failure_t_star(q, q)) == doctest::Approx(f.delta1_star).epsilon(1e-4));
    }
    FailureOptions o;
    o.max_iter = 2;
    CHECK_THROWS_AS(solve_failure_distribution(o), NumericalError);
  }

  TEST_CASE("positivity scan and grids") {
    for (CopulaFamily f : kAllCopulaFamilies) {
      const auto rho = default_rho_grid(f, 9);
      CHECK(rho.size() == 9);
      const auto rep = positivity_scan(f, rho, interior_unit_grid(19));
      CHECK(rep.ok());
      CHECK(rep.points_checked == 19u * 19u * 9u);
    }
    const auto u = interior_unit_grid(3);
    CHECK(u == std::vector<double>{0.25, 0.5, 0.75});
    for (double r : default_rho_grid(CopulaFamily::Frank, 9)) {
      CHECK(r != 0.0);
    }
  }
}
