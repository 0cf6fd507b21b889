#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "trisieve/numerics.hpp"
#include "trisieve/rng.hpp"

using namespace trisieve;

namespace {

// P(X <= x, Y <= y) = int_{-inf}^{x} phi(t) Phi((y - rho t) / sqrt(1 - rho^2)) dt by Simpson.
double bvn_by_simpson(double x, double y, double rho) {
  const double lo = -12.0;
  const int m = 20000;
  const double h = (x - lo) / m;
  const double s = std::sqrt(1.0 - rho * rho);
  auto f = [&](double t) { return numerics::norm_pdf(t) * 0.5 * std::erfc(-(y - rho * t) / s / std::sqrt(2.0)); };
  double acc = f(lo) + f(x);
  for (int i = 1; i < m; ++i) {
    acc += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * h);
  }
  return acc * h / 3.0;
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("normal cdf, pdf and quantile") {
    CHECK(numerics::norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
    CHECK(numerics::norm_cdf(0.0) == 0.5);
    CHECK(numerics::norm_cdf(1.1) == doctest::Approx(0.8643339390536173).epsilon(1e-14));
    for (double p : {1e-12, 0.001, 0.2, 0.5, 0.77, 0.999, 1.0 - 1e-10}) {
      CHECK(numerics::norm_cdf(numerics::norm_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(std::isinf(numerics::norm_quantile(0.0)));
    CHECK(std::isinf(numerics::norm_quantile(1.0)));
  }

  TEST_CASE("bivariate normal cdf against closed forms and quadrature") {
    CHECK(numerics::bvn_cdf(0.0, 0.0, 0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(numerics::bvn_cdf(0.3, -0.7, 0.0) ==
          doctest::Approx(numerics::norm_cdf(0.3) * numerics::norm_cdf(-0.7)).epsilon(1e-14));
    const double pts[][3] = {{0.2, -0.4, 0.3}, {1.5, 0.5, -0.8}, {-1.0, -1.2, 0.95}, {0.7, 0.1, -0.97},
                             {-2.0, 1.0, 0.6}, {0.0, 0.3, 0.999}};
    for (const auto& p : pts) {
      CHECK(numerics::bvn_cdf(p[0], p[1], p[2]) == doctest::Approx(bvn_by_simpson(p[0], p[1], p[2])).epsilon(1e-9));
    }
  }

  TEST_CASE("Gauss-Legendre is exact for degree 2n-1") {
    const auto& r = numerics::gauss_legendre(8);
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      s += r.weights[i] * std::pow(r.nodes[i], 14);
    }
    CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-13));
    CHECK(numerics::integrate([](double x) { return std::exp(x); }, 0.0, 1.0, 16) ==
          doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  }

  TEST_CASE("root finding") {
    auto f = [](double x) { return x * x - 2.0; };
    CHECK(numerics::find_root(f, 0.0, 2.0, 1e-14) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(numerics::bisect(f, 0.0, 2.0, 1e-12) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK_THROWS_AS(numerics::find_root(f, 2.0, 3.0, 1e-10), NumericalError);
  }

  TEST_CASE("pairwise sum") {
    std::vector<double> v;
    for (int i = 1; i <= 1000; ++i) {
      v.push_back(i);
    }
    CHECK(numerics::pairwise_sum(v) == 500500.0);
    CHECK(numerics::pairwise_sum(std::vector<double>{}) == 0.0);
  }
}

TEST_SUITE("rng") {
  TEST_CASE("streams are reproducible and distinct") {
    RngStream a(42, 7);
    RngStream b(42, 7);
    RngStream c(42, 8);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
      const double ua = a.uniform();
      CHECK(ua == b.uniform());
      differs = differs || ua != c.uniform();
      CHECK(ua > 0.0);
      CHECK(ua < 1.0);
    }
    CHECK(differs);
    std::set<std::uint64_t> seeds;
    for (std::uint64_t k = 0; k < 1000; ++k) {
      seeds.insert(derive_seed(1, k));
    }
    CHECK(seeds.size() == 1000);
  }

  TEST_CASE("normal and exponential moments") {
    RngStream s(9);
    const int n = 200000;
    double m1 = 0.0;
    double m2 = 0.0;
    double e1 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = s.normal();
      m1 += z;
      m2 += z * z;
      e1 += s.exponential();
    }
    CHECK(std::abs(m1 / n) < 0.01);
    CHECK(std::abs(m2 / n - 1.0) < 0.015);
    CHECK(std::abs(e1 / n - 1.0) < 0.01);
  }
}
