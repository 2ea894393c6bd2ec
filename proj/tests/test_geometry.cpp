#include <doctest.h>

#include <cmath>

#include "mzkit/geometry.hpp"
#include "mzkit/rng.hpp"

using namespace mzkit;

TEST_CASE("rho: fixed points of the sphere-lift distance") {
  CHECK(rho(Point{0.3, -0.2}, Point{0.3, -0.2}) == doctest::Approx(0.0));
  CHECK(rho(Point{0.0}, Point{1.0}) == doctest::Approx(M_PI / 2.0).epsilon(1e-14));
  CHECK(rho(Point{1.0, 0.0}, Point{-1.0, 0.0}) == doctest::Approx(M_PI).epsilon(1e-14));
  // clamping keeps slightly-outside points finite
  CHECK(std::isfinite(rho(Point{1.0 + 1e-14}, Point{0.5})));
}

TEST_CASE("rho: triangle inequality on random triples") {
  Rng rng(314159);
  for (int rep = 0; rep < 1000; ++rep) {
    auto x = rng.in_ball(2), y = rng.in_ball(2), z = rng.in_ball(2);
    CHECK(rho(x, z) <= rho(x, y) + rho(y, z) + 1e-12);
  }
}

TEST_CASE("rho dominates the Euclidean distance; bulk comparability") {
  Rng rng(2718);
  double worst = 0.0;
  for (int rep = 0; rep < 2000; ++rep) {
    auto x = rng.in_ball(2), y = rng.in_ball(2);
    for (auto* p : {&x, &y})
      for (auto& c : *p) c *= 0.5;  // restrict to |x| <= 1/2
    double e = std::hypot(x[0] - y[0], x[1] - y[1]);
    if (e == 0.0) continue;
    double r = rho(x, y) / e;
    CHECK(r >= 1.0 - 1e-12);
    worst = std::max(worst, r);
  }
  // bulk equivalence constant, frozen from the oracle run
  CHECK(worst <= 2.0);
  CHECK(worst >= 1.05);  // the ratio genuinely exceeds 1 near |x| = 1/2
}

TEST_CASE("box proxy quasi-metric") {
  auto box = Measure::box(2, {{{-1.0, 1.0}}, {{0.0, 4.0}}});
  Point a{0.0, 2.0}, b{0.5, 2.0}, c{0.0, 3.9};
  CHECK(rho_box(a, a, box) == doctest::Approx(0.0));
  CHECK(rho_box(a, b, box) == doctest::Approx(rho_box(b, a, box)));
  // per-axis angle map matches the 1-d rho on the affinely mapped axis
  CHECK(rho_box(a, b, box) == doctest::Approx(rho(Point{0.0}, Point{0.5})).epsilon(1e-13));
  CHECK(rho_box(a, c, box) == doctest::Approx(rho(Point{0.0}, Point{0.95})).epsilon(1e-13));
  // max over axes: triangle inequality survives
  Rng rng(55);
  for (int rep = 0; rep < 300; ++rep) {
    Point x{rng.uniform(-1.0, 1.0), rng.uniform(0.0, 4.0)};
    Point y{rng.uniform(-1.0, 1.0), rng.uniform(0.0, 4.0)};
    Point z{rng.uniform(-1.0, 1.0), rng.uniform(0.0, 4.0)};
    CHECK(rho_box(x, z, box) <= rho_box(x, y, box) + rho_box(y, z, box) + 1e-12);
  }
}

TEST_CASE("metric ball volume proxies") {
  auto m1 = Measure::ball(1, 0.5);
  auto v = metric_ball_volume(m1, Point{0.0}, 0.1);
  CHECK(v.lebesgue == doctest::Approx(0.11).epsilon(1e-14));  // 0.1 * (1 + 0.1)

  // boundary point: eps^(n+1) scale
  auto vb = metric_ball_volume(m1, Point{1.0}, 0.1);
  CHECK(vb.lebesgue == doctest::Approx(0.01).epsilon(1e-12));

  // weighted proxy at a = 1/2 equals the lebesgue proxy
  CHECK(v.weighted == doctest::Approx(v.lebesgue).epsilon(1e-14));

  CHECK_THROWS_AS(metric_ball_volume(m1, Point{0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(metric_ball_volume(m1, Point{0.0}, 4.0), std::invalid_argument);
}

TEST_CASE("monte-carlo volume vs proxy comparability") {
  auto disk = Measure::ball(2, 1.0);
  double cmax = 0.0, cmin = 1e300;
  for (double r : {0.0, 0.5, 0.9}) {
    Point x{r, 0.0};
    auto proxy = metric_ball_volume(disk, x, 0.2);
    auto mc = metric_ball_volume_mc(disk, x, 0.2, 7777, 200000);
    double ratio = mc.lebesgue / proxy.lebesgue;
    cmax = std::max(cmax, ratio);
    cmin = std::min(cmin, ratio);
    double wratio = mc.weighted / proxy.weighted;
    CHECK(wratio > 0.2);
    CHECK(wratio < 6.0);
  }
  // two-sided comparability constant observed around 2-4
  CHECK(cmax < 6.0);
  CHECK(cmin > 0.2);
  // seeded: identical seeds reproduce identical estimates
  auto a = metric_ball_volume_mc(disk, Point{0.5, 0.0}, 0.2, 123, 5000);
  auto b = metric_ball_volume_mc(disk, Point{0.5, 0.0}, 0.2, 123, 5000);
  CHECK(a.lebesgue == b.lebesgue);
}

TEST_CASE("boundary distance closed forms") {
  auto ball = Measure::ball(2, 0.5);
  CHECK(boundary_distance(ball, Point{0.0, 0.0}) == doctest::Approx(1.0));
  CHECK(boundary_distance(ball, Point{0.45, -0.6}) == doctest::Approx(0.25).epsilon(1e-14));

  auto box = Measure::box(2, {{{-1.0, 1.0}}, {{-1.0, 1.0}}});
  CHECK(boundary_distance(box, Point{0.5, -0.9}) == doctest::Approx(0.1).epsilon(1e-13));
}

TEST_CASE("boundary distance on ellipsoids (normal equation)") {
  auto ell = Measure::ellipsoid(2, {2.0, 1.0});
  // center: min semiaxis
  CHECK(boundary_distance(ell, Point{0.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-10));
  // on the long axis past the evolute cusp: nearest vertex
  CHECK(boundary_distance(ell, Point{1.9, 0.0}) == doctest::Approx(0.1).epsilon(1e-9));
  // inside the cusp: off-axis closest point, distance sqrt(2/3)
  CHECK(boundary_distance(ell, Point{1.0, 0.0}) ==
        doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-9));
  // generic point: compare against a dense boundary sweep
  Point x{0.7, 0.4};
  double best = 1e300;
  for (int i = 0; i < 200000; ++i) {
    double th = 2.0 * M_PI * i / 200000;
    best = std::min(best, std::hypot(2.0 * std::cos(th) - x[0], std::sin(th) - x[1]));
  }
  CHECK(boundary_distance(ell, x) == doctest::Approx(best).epsilon(1e-8));
  // sphere special case
  auto sph = Measure::ellipsoid(2, {1.5, 1.5});
  CHECK(boundary_distance(sph, Point{0.3, 0.0}) == doctest::Approx(1.2).epsilon(1e-10));
}

TEST_CASE("equilibrium mass: arcsine closed forms in 1-d") {
  auto m = Measure::ball(1, 0.5);
  CHECK(equilibrium_mass(m, {Point{0.0}, 1.0, MetricKind::Euclidean}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(equilibrium_mass(m, {Point{0.0}, 0.5, MetricKind::Euclidean}) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // additivity: [0, 1/2) splits as [0, 1/4) + [1/4, 1/2) via centered balls
  double whole = equilibrium_mass(m, {Point{0.25}, 0.25, MetricKind::Euclidean});
  double left = equilibrium_mass(m, {Point{0.125}, 0.125, MetricKind::Euclidean});
  double right = equilibrium_mass(m, {Point{0.375}, 0.125, MetricKind::Euclidean});
  CHECK(whole == doctest::Approx(left + right).epsilon(1e-13));
  // monotone under inclusion
  CHECK(equilibrium_mass(m, {Point{0.1}, 0.2, MetricKind::Euclidean}) <=
        equilibrium_mass(m, {Point{0.1}, 0.4, MetricKind::Euclidean}));
}

TEST_CASE("equilibrium mass: disk") {
  auto disk = Measure::ball(2, 0.5);
  CHECK(equilibrium_mass(disk, {Point{0.0, 0.0}, 1.0, MetricKind::Euclidean}) ==
        doctest::Approx(1.0).epsilon(1e-10));
  // interior ball: mass of B(0, r) under (2pi)^-1 (1-|x|^2)^(-1/2) dV is
  // 1 - sqrt(1 - r^2)
  for (double r : {0.3, 0.6}) {
    CHECK(equilibrium_mass(disk, {Point{0.0, 0.0}, r, MetricKind::Euclidean}) ==
          doctest::Approx(1.0 - std::sqrt(1.0 - r * r)).epsilon(1e-9));
  }
  // monotone in the radius
  double m1 = equilibrium_mass(disk, {Point{0.2, 0.1}, 0.2, MetricKind::Euclidean});
  double m2 = equilibrium_mass(disk, {Point{0.2, 0.1}, 0.4, MetricKind::Euclidean});
  CHECK(m1 < m2);
  CHECK_THROWS_AS(equilibrium_mass(disk, {Point{0.9, 0.0}, 0.5, MetricKind::Euclidean}),
                  std::invalid_argument);
}

TEST_CASE("equilibrium mass: box proxy density") {
  auto box = Measure::box(1, {{{-1.0, 1.0}}});
  // proxy density 1/sqrt(d) on the interval; normalized, additive, monotone
  double full = equilibrium_mass(box, {Point{0.0}, 1.0, MetricKind::Euclidean});
  CHECK(full == doctest::Approx(1.0).epsilon(1e-12));
  double half = equilibrium_mass(box, {Point{0.0}, 0.5, MetricKind::Euclidean});
  CHECK(half > 0.05);
  CHECK(half < 0.95);
  double l = equilibrium_mass(box, {Point{-0.25}, 0.25, MetricKind::Euclidean});
  double r = equilibrium_mass(box, {Point{0.25}, 0.25, MetricKind::Euclidean});
  CHECK(half == doctest::Approx(l + r).epsilon(1e-12));
}

TEST_CASE("quasi distance dispatch") {
  auto ell = Measure::ellipsoid(2, {2.0, 1.0});
  // pullback: distance computed on the unit-ball preimage
  CHECK(quasi_distance(ell, Point{2.0, 0.0}, Point{-2.0, 0.0}) ==
        doctest::Approx(M_PI).epsilon(1e-13));
  auto ball = Measure::ball(2, 0.0);
  CHECK(quasi_distance(ball, Point{0.0, 0.0}, Point{1.0, 0.0}) ==
        doctest::Approx(M_PI / 2.0).epsilon(1e-13));
}
