#include <doctest.h>

#include <cmath>

#include "mzkit/scaling.hpp"

using namespace mzkit;

TEST_CASE("jstar: half-integer closed form") {
  // J_{1/2}(t) = sqrt(2/(pi t)) sin t, so J*_{1/2}(t) = sqrt(2/pi) sin(t)/t
  for (double t : {0.1, 1.0, 3.0, 10.0, 20.0, 50.0}) {
    double expected = std::sqrt(2.0 / M_PI) * std::sin(t) / t;
    CHECK(jstar(0.5, t) == doctest::Approx(expected).epsilon(1e-11));
  }
  // value at zero: 1 / (2^nu Gamma(nu+1))
  for (double nu : {0.5, 1.0, 1.5, 2.0}) {
    double expected = std::exp(-nu * std::log(2.0) - std::lgamma(nu + 1.0));
    CHECK(jstar(nu, 0.0) == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK_THROWS_AS(jstar(0.4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(jstar(0.5, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(jstar(0.5, 201.0), std::invalid_argument);
}

TEST_CASE("jstar: both evaluation regimes agree with the nu=3/2 closed form") {
  // J_{3/2}(t) = sqrt(2/(pi t)) (sin t / t - cos t); the crossover sits at
  // t = 10, so this exercises the series below and the standard evaluation
  // above with one oracle
  for (double t : {1.0, 5.0, 8.0, 9.9, 10.1, 12.0, 25.0, 80.0}) {
    double exact =
        std::sqrt(2.0 / (M_PI * t)) * (std::sin(t) / t - std::cos(t)) / std::pow(t, 1.5);
    CHECK(jstar(1.5, t) == doctest::Approx(exact).epsilon(1e-10));
  }
}

TEST_CASE("bessel recurrence in jstar form") {
  // J_{nu-1}(t) + J_{nu+1}(t) = (2 nu / t) J_nu(t), rewritten as
  // J*_{nu-1}(t) + t^2 J*_{nu+1}(t) = 2 nu J*_nu(t)
  for (double nu : {1.5, 2.0, 2.5}) {
    for (double t = 0.1; t <= 50.0; t += 0.7) {
      double lhs = jstar(nu - 1.0, t) + t * t * jstar(nu + 1.0, t);
      double rhs = 2.0 * nu * jstar(nu, t);
      CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("bessel zeros: sinc zeros and the first zero of J_1") {
  auto z = bessel_zeros(0.5, 20.0);
  REQUIRE(z.size() >= 6);
  for (std::size_t i = 0; i < 6; ++i)
    CHECK(z[i] == doctest::Approx((i + 1) * M_PI).epsilon(1e-11));

  auto z1 = bessel_zeros(1.0, 10.0);
  REQUIRE(!z1.empty());
  CHECK(z1[0] == doctest::Approx(3.8317059702).epsilon(1e-9));
}

TEST_CASE("scaling error: decreasing sup over the degree ladder") {
  auto m = Measure::ball(1, 0.5);
  auto rows = scaling_error(m, {20, 40, 80}, 5.0, 41);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].sup_error > rows[1].sup_error);
  CHECK(rows[1].sup_error > rows[2].sup_error);
  // frozen from the oracle run: 0.0819, 0.0411, 0.0206
  CHECK(rows[0].sup_error == doctest::Approx(0.0819).epsilon(0.05));
  CHECK(rows[2].sup_error <= 0.05);

  CHECK_THROWS_AS(scaling_error(m, {10}, 5.0, 41), std::invalid_argument);  // R/k > 1/4
}

TEST_CASE("bessel zero distance test") {
  // sin zeros: multiples of pi are pairwise compatible
  std::vector<Point> X = {{0.0}, {M_PI}, {2.0 * M_PI}};
  auto rep = bessel_zero_distance_test(X, 0.5, 1e-9);
  CHECK(rep.compatible);
  REQUIRE(rep.pairs.size() == 3);

  // a pair at distance 1 sits below the first zero of any J_nu, nu >= 1/2
  std::vector<Point> Y = {{0.0}, {1.0}};
  CHECK(!bessel_zero_distance_test(Y, 0.5, 1e-9).compatible);
  CHECK(!bessel_zero_distance_test(Y, 1.0, 1e-9).compatible);

  // perturbation by 10x the tolerance breaks compatibility
  std::vector<Point> Z = {{0.0}, {M_PI + 1e-5}};
  CHECK(bessel_zero_distance_test(Z, 0.5, 1e-4).compatible);
  CHECK(!bessel_zero_distance_test(Z, 0.5, 1e-6).compatible);

  CHECK_THROWS_AS(bessel_zero_distance_test({{0.0}}, 0.5, 1e-9), std::invalid_argument);
}

TEST_CASE("counts in small scaled balls grow linearly in the radius") {
  // gauss nodes at k = 200: #(Lambda_k within |x| < M/k) is proportional
  // to M within a factor of 2 for M in {4, 8, 16}
  int k = 200;
  auto nodes = gauss_nodes_1d(k + 1, 0.5);
  double lo = 1e300, hi = 0.0;
  for (double M : {4.0, 8.0, 16.0}) {
    int count = 0;
    for (int i = 0; i <= k; ++i)
      if (std::abs(nodes.nodes[i]) < M / k) ++count;
    CHECK(count > 0);
    double rate = count / M;
    lo = std::min(lo, rate);
    hi = std::max(hi, rate);
  }
  CHECK(hi / lo <= 2.0);
}

TEST_CASE("orthogonality search: gauss initialization reaches machine zero") {
  auto m = Measure::ball(1, 0.5);
  int k = 12;
  auto nodes = gauss_nodes_1d(k + 1, 0.5);
  std::vector<Point> init;
  for (int i = 0; i <= k; ++i) init.push_back({nodes.nodes[i]});
  auto res = orthogonality_residual_search(m, k, k + 1, 99, 1, &init, 400);
  CHECK(res.best_residual <= 1e-12);
  REQUIRE(res.configuration.size() == static_cast<std::size_t>(k + 1));
}

TEST_CASE("orthogonality search: single point has zero residual") {
  auto m = Measure::ball(2, 0.5);
  auto res = orthogonality_residual_search(m, 3, 1, 5, 2, nullptr, 200);
  CHECK(res.best_residual == 0.0);
}

TEST_CASE("orthogonality search: deterministic from the seed") {
  auto m = Measure::ball(2, 0.5);
  auto r1 = orthogonality_residual_search(m, 2, 4, 31337, 3, nullptr, 300);
  auto r2 = orthogonality_residual_search(m, 2, 4, 31337, 3, nullptr, 300);
  CHECK(r1.best_residual == r2.best_residual);
  CHECK(r1.best_restart == r2.best_restart);
  REQUIRE(r1.configuration.size() == r2.configuration.size());
  for (std::size_t i = 0; i < r1.configuration.size(); ++i)
    for (std::size_t t = 0; t < r1.configuration[i].size(); ++t)
      CHECK(r1.configuration[i][t] == r2.configuration[i][t]);
  CHECK(r1.restarts.size() == 3);
  // every iterate stays in the closed ball
  for (const auto& p : r1.configuration) CHECK(p[0] * p[0] + p[1] * p[1] <= 1.0 + 1e-12);

  CHECK_THROWS_AS(orthogonality_residual_search(m, 2, 7, 1, 1, nullptr, 10),
                  std::invalid_argument);  // m > dim P_2 = 6
}
