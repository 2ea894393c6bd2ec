#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mzkit/generators.hpp"
#include "mzkit/io.hpp"

using namespace mzkit;

TEST_CASE("gauss_1d: degree-1 level gives the Legendre zeros") {
  GeneratorParams params;
  params.ks = {1};
  params.a = 0.5;
  auto out = generate_family(FamilyKind::Gauss1d, 1, params, 0);
  REQUIRE(out.family.levels.size() == 1);
  REQUIRE(out.family.levels[0].points.size() == 2);
  CHECK(out.family.levels[0].points[0][0] ==
        doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(out.family.levels[0].points[1][0] ==
        doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("random_separated: the construction enforces its own separation") {
  GeneratorParams params;
  params.ks = {8, 16};
  params.eps = 0.6;
  params.count = 24;
  auto out = generate_family(FamilyKind::RandomSeparated, 2, params, 2024);
  auto m = Measure::ball(2, 0.5);
  out.family.validate(m);
  for (const auto& lvl : out.family.levels) {
    double s = separation_constant(out.family, lvl.k, m);
    CHECK(s >= params.eps);
  }

  // an impossible separation saturates and flags
  GeneratorParams hard;
  hard.ks = {4};
  hard.eps = 2.5;
  hard.count = 500;
  auto sat = generate_family(FamilyKind::RandomSeparated, 2, hard, 7);
  CHECK(sat.saturated[0]);
  CHECK(sat.family.levels[0].points.size() < 500);
}

TEST_CASE("equilibrium_random: 1-d samples follow the arcsine law") {
  GeneratorParams params;
  params.ks = {1};
  params.count = 10000;
  auto out = generate_family(FamilyKind::EquilibriumRandom, 1, params, 12345);
  auto pts = out.family.levels[0].points;
  std::vector<double> xs;
  for (const auto& p : pts) xs.push_back(p[0]);
  std::sort(xs.begin(), xs.end());
  double ks_stat = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = std::asin(std::max(-1.0, std::min(1.0, xs[i]))) / M_PI + 0.5;
    ks_stat = std::max(ks_stat, std::abs(f - static_cast<double>(i) / xs.size()));
    ks_stat = std::max(ks_stat, std::abs(f - static_cast<double>(i + 1) / xs.size()));
  }
  CHECK(ks_stat <= 0.05);
}

TEST_CASE("equilibrium_random: 2-d radial mass matches the closed form") {
  GeneratorParams params;
  params.ks = {1};
  params.count = 20000;
  auto out = generate_family(FamilyKind::EquilibriumRandom, 2, params, 777);
  int inside = 0;
  for (const auto& p : out.family.levels[0].points) {
    CHECK(p[0] * p[0] + p[1] * p[1] <= 1.0 + 1e-12);
    if (p[0] * p[0] + p[1] * p[1] < 0.25) ++inside;
  }
  // mass of B(0, 1/2) under the disk equilibrium measure: 1 - sqrt(3)/2
  double expected = 1.0 - std::sqrt(3.0) / 2.0;
  CHECK(std::abs(static_cast<double>(inside) / 20000 - expected) <= 0.01);
}

TEST_CASE("tensor_gauss: product thinned to the ball") {
  GeneratorParams params;
  params.ks = {4};
  params.a = 0.5;
  auto out = generate_family(FamilyKind::TensorGauss, 2, params, 0);
  const auto& pts = out.family.levels[0].points;
  CHECK(pts.size() == 13);  // 25 grid points minus the corner region
  for (const auto& p : pts) CHECK(p[0] * p[0] + p[1] * p[1] <= 1.0 + 1e-12);
}

TEST_CASE("generation is deterministic and round-trips through JSON bit-exactly") {
  GeneratorParams params;
  params.ks = {3, 6};
  params.count = 15;
  auto a = generate_family(FamilyKind::EquilibriumRandom, 2, params, 31415);
  auto b = generate_family(FamilyKind::EquilibriumRandom, 2, params, 31415);
  REQUIRE(a.family.levels.size() == b.family.levels.size());
  for (std::size_t l = 0; l < a.family.levels.size(); ++l)
    for (std::size_t i = 0; i < a.family.levels[l].points.size(); ++i)
      for (int t = 0; t < 2; ++t)
        CHECK(a.family.levels[l].points[i][t] == b.family.levels[l].points[i][t]);

  auto text = dump_json17(family_to_json(a.family));
  auto parsed = family_from_json(nlohmann::json::parse(text));
  REQUIRE(parsed.levels.size() == a.family.levels.size());
  for (std::size_t l = 0; l < parsed.levels.size(); ++l) {
    CHECK(parsed.levels[l].k == a.family.levels[l].k);
    for (std::size_t i = 0; i < parsed.levels[l].points.size(); ++i)
      for (int t = 0; t < 2; ++t)
        CHECK(parsed.levels[l].points[i][t] == a.family.levels[l].points[i][t]);
  }
}

TEST_CASE("parameter validation") {
  GeneratorParams params;
  params.ks = {};
  CHECK_THROWS_AS(generate_family(FamilyKind::Gauss1d, 1, params, 0), std::invalid_argument);
  params.ks = {3, 3};
  CHECK_THROWS_AS(generate_family(FamilyKind::Gauss1d, 1, params, 0), std::invalid_argument);
  params.ks = {3};
  CHECK_THROWS_AS(generate_family(FamilyKind::Gauss1d, 2, params, 0), std::invalid_argument);
  params.count = 0;
  CHECK_THROWS_AS(generate_family(FamilyKind::RandomSeparated, 2, params, 0),
                  std::invalid_argument);
}
