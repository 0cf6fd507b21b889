#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "support.hpp"
#include "trisieve/copula.hpp"
#include "trisieve/numerics.hpp"
#include "trisieve/rng.hpp"

using namespace trisieve;

namespace {

std::vector<double> admissible(CopulaFamily f) {
  switch (f) {
    case CopulaFamily::Gaussian:
      return {-0.8, -0.3, 0.0, 0.4, 0.9};
    case CopulaFamily::Frank:
      return {-8.0, -2.0, 0.5, 3.0, 12.0};
    case CopulaFamily::Clayton:
      return {0.3, 1.0, 2.0, 5.0, 10.0};
    case CopulaFamily::Gumbel:
      return {1.1, 1.5, 2.0, 4.0, 8.0};
  }
  return {};
}

double frank_closed_form(double th, double u, double v) {
  return -std::log1p(std::expm1(-th * u) * std::expm1(-th * v) / std::expm1(-th)) / th;
}

double frank_density(double th, double u, double v) {
  const double a = -std::expm1(-th);
  const double den = a - (-std::expm1(-th * u)) * (-std::expm1(-th * v));
  return th * a * std::exp(-th * (u + v)) / (den * den);
}

}  // namespace

TEST_SUITE("copula") {
  TEST_CASE("independence and boundary identities") {
    CHECK(copula::cdf(DependenceParam(CopulaFamily::Gaussian, 0.0), 0.3, 0.7) == doctest::Approx(0.21).epsilon(1e-14));
    for (CopulaFamily f : kAllCopulaFamilies) {
      for (double r : admissible(f)) {
        const DependenceParam p(f, r);
        for (double u : {0.0, 0.1, 0.4, 0.77, 1.0}) {
          CHECK(std::abs(copula::cdf(p, u, 1.0) - u) <= 1e-12);
          CHECK(std::abs(copula::cdf(p, 1.0, u) - u) <= 1e-12);
          CHECK(std::abs(copula::cdf(p, u, 0.0)) <= 1e-12);
          CHECK(std::abs(copula::cdf(p, 0.0, u)) <= 1e-12);
        }
      }
    }
  }

  TEST_CASE("Frank closed form and density quadrature") {
    const DependenceParam p(CopulaFamily::Frank, 5.0);
    const double c = copula::cdf(p, 0.5, 0.5);
    CHECK(std::abs(c - 0.3771485) < 1e-6);
    CHECK(c == doctest::Approx(frank_closed_form(5.0, 0.5, 0.5)).epsilon(1e-13));
    // Midpoint rule for the density over [0,0.5]^2.
    const int m = 400;
    const double h = 0.5 / m;
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        s += frank_density(5.0, (i + 0.5) * h, (j + 0.5) * h);
      }
    }
    CHECK(s * h * h == doctest::Approx(c).epsilon(1e-5));
  }

  TEST_CASE("comonotone copula") {
    CHECK(copula::comonotone_cdf(1.0 / 3.0, 1.0 / 3.0) == doctest::Approx(1.0 / 3.0));
    CHECK(copula::comonotone_cdf(1.0 / 9.0, 1.0 / 3.0) == doctest::Approx(1.0 / 9.0));
    CHECK(copula::comonotone_cdf(0.7, 0.2) == doctest::Approx(0.2));
    const auto draws = copula::sample_comonotone(100, 3);
    for (const auto& d : draws) {
      CHECK(d[0] == d[1]);
    }
  }

  TEST_CASE("2-increasing on a 33x33 grid") {
    std::vector<double> g;
    for (int k = 0; k <= 32; ++k) {
      g.push_back(k / 32.0);
    }
    for (CopulaFamily f : kAllCopulaFamilies) {
      for (double r : admissible(f)) {
        const DependenceParam p(f, r);
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < g.size(); ++i) {
          for (std::size_t j = 0; j + 1 < g.size(); ++j) {
            const double vol = copula::cdf(p, g[i + 1], g[j + 1]) - copula::cdf(p, g[i], g[j + 1]) -
                               copula::cdf(p, g[i + 1], g[j]) + copula::cdf(p, g[i], g[j]);
            worst = std::min(worst, vol);
          }
        }
        CHECK(worst >= -1e-12);
      }
    }
  }

  TEST_CASE("analytic partials match central differences") {
    for (CopulaFamily f : kAllCopulaFamilies) {
      for (double r : admissible(f)) {
        if (f == CopulaFamily::Frank && r == 0.0) {
          continue;
        }
        const DependenceParam p(f, r);
        for (int i = 1; i <= 9; ++i) {
          for (int j = 1; j <= 9; ++j) {
            const double u = i / 10.0;
            const double v = j / 10.0;
            const CopulaPartials a = copula::partials(p, u, v);
            const double h = 1e-6;
            const double c1 = testing::central_difference([&](double x) { return copula::cdf(p, x, v); }, u, h);
            const double c2 = testing::central_difference([&](double x) { return copula::cdf(p, u, x); }, v, h);
            const double hr = 1e-6 * std::max(1.0, std::abs(r));
            const double cr = testing::central_difference(
                [&](double x) { return copula::cdf(DependenceParam(f, x), u, v); }, r, hr);
            CHECK(std::abs(a.c1 - c1) / (1.0 + std::abs(c1)) < 1e-6);
            CHECK(std::abs(a.c2 - c2) / (1.0 + std::abs(c2)) < 1e-6);
            CHECK(std::abs(a.crho - cr) / (1.0 + std::abs(cr)) < 1e-6);
            const CopulaValues val = copula::evaluate(p, u, v);
            CHECK(val.c == doctest::Approx(copula::cdf(p, u, v)).epsilon(1e-13));
            CHECK(val.c1 == doctest::Approx(a.c1).epsilon(1e-13));
          }
        }
      }
    }
    const CopulaPartials ind = copula::partials(DependenceParam(CopulaFamily::Gaussian, 0.0), 0.3, 0.7);
    CHECK(ind.c1 == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(copula::partials(DependenceParam(CopulaFamily::Gaussian, 0.3), 0.5, 0.5).crho > 0.0);
    CHECK_THROWS_AS(copula::partials(DependenceParam(CopulaFamily::Gaussian, 0.3), 0.0, 0.5), std::domain_error);
  }

  TEST_CASE("Spearman rho") {
    for (double r : {-0.9, -0.4, 0.2, 0.7}) {
      const double closed = 6.0 / numerics::kPi * std::asin(r / 2.0);
      CHECK(copula::spearman_rho(DependenceParam(CopulaFamily::Gaussian, r)) == doctest::Approx(closed).epsilon(1e-8));
    }
    CHECK(std::abs(copula::spearman_rho(DependenceParam(CopulaFamily::Gaussian, 0.0))) < 1e-12);
    const double r05 = copula::from_spearman(CopulaFamily::Gaussian, 0.5).rho();
    CHECK(r05 == doctest::Approx(2.0 * std::sin(numerics::kPi / 12.0)).epsilon(1e-8));
    CHECK(r05 == doctest::Approx(0.5176).epsilon(1e-4));
    for (CopulaFamily f : kAllCopulaFamilies) {
      for (double s : {0.2, 0.5, 0.7}) {
        CHECK(copula::spearman_rho(copula::from_spearman(f, s)) == doctest::Approx(s).epsilon(1e-8));
      }
    }
    CHECK_THROWS_AS(copula::from_spearman(CopulaFamily::Clayton, -0.5), std::domain_error);
    CHECK_THROWS_AS(copula::from_spearman(CopulaFamily::Gumbel, -0.1), std::domain_error);
  }

  TEST_CASE("Clayton Spearman rho against Monte Carlo ranks") {
    const DependenceParam p(CopulaFamily::Clayton, 2.0);
    const auto draws = copula::sample(p, 1000000, 11);
    std::vector<double> a(draws.size());
    std::vector<double> b(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
      a[i] = draws[i][0];
      b[i] = draws[i][1];
    }
    CHECK(std::abs(testing::spearman_sample(a, b) - copula::spearman_rho(p)) < 0.005);
  }

  TEST_CASE("sampling reproduces the dependence") {
    auto emp = [](const DependenceParam& p, std::uint64_t seed) {
      const auto draws = copula::sample(p, 100000, seed);
      std::vector<double> a;
      std::vector<double> b;
      for (const auto& d : draws) {
        a.push_back(d[0]);
        b.push_back(d[1]);
      }
      return testing::spearman_sample(a, b);
    };
    CHECK(std::abs(emp(DependenceParam(CopulaFamily::Gaussian, 0.0), 1)) < 0.01);
    CHECK(std::abs(emp(DependenceParam(CopulaFamily::Gaussian, 0.5176), 2) - 0.5) < 0.01);
    CHECK(std::abs(emp(DependenceParam(CopulaFamily::Gumbel, 2.0), 3) -
                   copula::spearman_rho(DependenceParam(CopulaFamily::Gumbel, 2.0))) < 0.01);
    const auto x = copula::sample(DependenceParam(CopulaFamily::Frank, 4.0), 50, 5);
    const auto y = copula::sample(DependenceParam(CopulaFamily::Frank, 4.0), 50, 5);
    CHECK(x == y);
  }

  TEST_CASE("density is the mixed second difference") {
    for (CopulaFamily f : kAllCopulaFamilies) {
      for (double r : admissible(f)) {
        const DependenceParam p(f, r);
        for (double u : {0.1, 0.45, 0.81}) {
          for (double v : {0.2, 0.6, 0.9}) {
            const double h = 1e-4;
            const double fd = (copula::cdf(p, u + h, v + h) - copula::cdf(p, u + h, v - h) -
                               copula::cdf(p, u - h, v + h) + copula::cdf(p, u - h, v - h)) /
                              (4.0 * h * h);
            CHECK(std::abs(copula::density(p, u, v) - fd) / (1.0 + fd) < 1e-5);
          }
        }
      }
    }
  }

  TEST_CASE("conditional inverse") {
    for (CopulaFamily f : kAllCopulaFamilies) {
      const DependenceParam p = copula::from_spearman(f, 0.6);
      for (double u : {0.05, 0.5, 0.93}) {
        for (double w : {0.01, 0.4, 0.99}) {
          CHECK(copula::conditional_cdf(p, u, copula::conditional_inverse(p, u, w)) == doctest::Approx(w).epsilon(1e-8));
        }
      }
    }
  }

  TEST_CASE("positivity of dC/drho") {
    std::vector<double> u;
    for (int k = 1; k <= 19; ++k) {
      u.push_back(k / 20.0);
    }
    std::vector<double> gr;
    for (int k = 0; k < 19; ++k) {
      gr.push_back(-0.9 + 0.1 * k);
    }
    CHECK(copula::si_ordering_scan(CopulaFamily::Gaussian, gr, u).ok());
    std::vector<double> fr;
    for (int k = -10; k <= 10; ++k) {
      if (k != 0) {
        fr.push_back(k);
      }
    }
    const auto rep = copula::si_ordering_scan(CopulaFamily::Frank, fr, u);
    CHECK(rep.ok());
    CHECK(rep.points_checked == 19u * 19u * 20u);
    CHECK(copula::si_ordering_scan(CopulaFamily::Clayton, {2.0}, {0.5}).ok());
  }

  TEST_CASE("unconstrained bijection") {
    for (CopulaFamily f : kAllCopulaFamilies) {
      const auto [lo, hi] = copula::unconstrained_bounds(f);
      CHECK(lo < hi);
      for (double t : {-1.5, -0.2, 0.0, 0.8, 2.0}) {
        const double r = copula::native_from_unconstrained(f, t);
        CHECK(copula::unconstrained_from_native(f, r) == doctest::Approx(t).epsilon(1e-9));
        const double fd =
            testing::central_difference([&](double x) { return copula::native_from_unconstrained(f, x); }, t, 1e-6);
        CHECK(copula::dnative_dunconstrained(f, t) == doctest::Approx(fd).epsilon(1e-7));
      }
    }
    CHECK(parse_copula_family("frank") == CopulaFamily::Frank);
    CHECK_THROWS_AS(parse_copula_family("plackett"), std::invalid_argument);
  }
}
