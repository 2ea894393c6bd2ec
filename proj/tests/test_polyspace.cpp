#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mzkit/errors.hpp"
#include "mzkit/polyspace.hpp"
#include "mzkit/rng.hpp"

using namespace mzkit;

namespace {

Point pt1(double x) { return Point{x}; }

// random polynomial with ONB coefficients c
struct RandomPoly {
  Eigen::VectorXd c;
  const PolySpace& ps;
  double operator()(std::span<const double> x) const { return c.dot(ps.basis_at(x)); }
  double norm() const { return c.norm(); }
};

RandomPoly random_poly(const PolySpace& ps, Rng& rng) {
  Eigen::VectorXd c(ps.dim());
  for (int i = 0; i < ps.dim(); ++i) c[i] = rng.uniform(-1.0, 1.0);
  return {c, ps};
}

}  // namespace

TEST_CASE("constant and linear ONB on the Lebesgue interval") {
  auto m = Measure::ball(1, 0.5);
  auto p0 = PolySpace::orthonormal_basis(m, 0);
  CHECK(p0.dim() == 1);
  CHECK(p0.coefficients()(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

  // hand Gram-Schmidt on {1, x}: ||x||^2 = 2/3, so phi_2 = sqrt(3/2) x
  auto p1 = PolySpace::orthonormal_basis(m, 1);
  CHECK(p1.dim() == 2);
  CHECK(p1.coefficients()(1, 0) == doctest::Approx(0.0));
  CHECK(p1.coefficients()(1, 1) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
}

TEST_CASE("disk linear space is orthonormal under quadrature") {
  auto ps = PolySpace::orthonormal_basis(Measure::ball(2, 0.5), 1);
  CHECK(ps.dim() == 3);
  CHECK(ps.orthonormality_residual() <= 1e-13);
}

TEST_CASE("kernel closed forms at degree 0 and 1") {
  auto m = Measure::ball(1, 0.5);
  auto p0 = PolySpace::orthonormal_basis(m, 0);
  CHECK(p0.kernel(pt1(0.3), pt1(-0.7)) == doctest::Approx(0.5).epsilon(1e-14));

  auto p1 = PolySpace::orthonormal_basis(m, 1);
  for (double x : {-0.9, 0.1, 0.8})
    for (double y : {-0.5, 0.0, 0.6})
      CHECK(p1.kernel(pt1(x), pt1(y)) ==
            doctest::Approx(0.5 + 1.5 * x * y).epsilon(1e-14));
}

TEST_CASE("kernel symmetry is bitwise") {
  Rng rng(7);
  for (auto backend : {0, 1}) {
    auto m = Measure::ball(1, 0.0);
    auto ps = backend == 0 ? PolySpace::orthonormal_basis(m, 8)
                           : PolySpace::recurrence_basis(m, 8);
    for (int rep = 0; rep < 20; ++rep) {
      double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
      CHECK(ps.kernel(pt1(x), pt1(y)) == ps.kernel(pt1(y), pt1(x)));
    }
  }
}

TEST_CASE("christoffel values and monotonicity in k") {
  auto m = Measure::ball(1, 0.5);
  CHECK(PolySpace::orthonormal_basis(m, 0).christoffel(pt1(0.0)).beta ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(PolySpace::orthonormal_basis(m, 1).christoffel(pt1(1.0)).beta ==
        doctest::Approx(2.0).epsilon(1e-13));

  // beta_k(x) is nondecreasing in k (adding nonnegative squares)
  for (double x : {-0.8, 0.0, 0.5}) {
    double prev = 0.0;
    for (int k = 0; k <= 10; ++k) {
      double b = PolySpace::orthonormal_basis(m, k).christoffel(pt1(x)).beta;
      CHECK(b >= prev - 1e-14);
      prev = b;
    }
  }
}

TEST_CASE("gauss_nodes_1d: classical nodes and total mass") {
  auto leg = gauss_nodes_1d(2, 0.5);
  CHECK(leg.nodes[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(leg.nodes[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));

  auto cheb = gauss_nodes_1d(3, 0.0);
  CHECK(cheb.nodes[0] == doctest::Approx(-std::sqrt(3.0) / 2.0).epsilon(1e-13));
  CHECK(cheb.nodes[1] == doctest::Approx(0.0));
  CHECK(cheb.nodes[2] == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-13));

  for (double a : {0.0, 0.5, 1.0, 2.5}) {
    auto r = gauss_nodes_1d(7, a);
    CHECK(r.weights.sum() == doctest::Approx(Measure::ball(1, a).mass()).epsilon(1e-13));
  }
  CHECK_THROWS_AS(gauss_nodes_1d(0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(gauss_nodes_1d(3, -1.0), std::invalid_argument);
}

TEST_CASE("reproduction: int K(x,.) p dmu = p(x)") {
  Rng rng(42);
  for (int n : {1, 2}) {
    for (double a : {0.0, 0.5, 1.0}) {
      auto m = Measure::ball(n, a);
      int k = 6;
      auto ps = PolySpace::orthonormal_basis(m, k);
      QuadratureRule q = m.quadrature(2 * k);
      std::vector<Point> nodes(q.points.rows(), Point(n));
      for (Eigen::Index i = 0; i < q.points.rows(); ++i)
        for (int t = 0; t < n; ++t) nodes[i][t] = q.points(i, t);
      Eigen::MatrixXd b = ps.basis_matrix(nodes);
      for (int rep = 0; rep < 20; ++rep) {
        auto p = random_poly(ps, rng);
        Point x(n);
        for (int t = 0; t < n; ++t) x[t] = rng.uniform(-0.6, 0.6);
        Eigen::VectorXd phix = ps.basis_at(x);
        double integral = 0.0;
        for (Eigen::Index i = 0; i < q.points.rows(); ++i)
          integral += q.weights[i] * phix.dot(b.col(i)) * p.c.dot(b.col(i));
        CHECK(std::abs(integral - p(x)) <= 1e-8 * p.norm());
      }
    }
  }
}

TEST_CASE("extremal characterization: |p(x)|^2 <= beta(x) for unit p") {
  Rng rng(11);
  auto ps = PolySpace::orthonormal_basis(Measure::ball(2, 0.5), 5);
  for (int rep = 0; rep < 30; ++rep) {
    auto p = random_poly(ps, rng);
    p.c /= p.norm();
    Point x = {rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)};
    double beta = ps.christoffel(x).beta;
    CHECK(p(x) * p(x) <= beta * (1.0 + 1e-12));
  }
}

TEST_CASE("projection consistency: top slice telescopes") {
  auto m = Measure::ball(2, 1.0);
  auto pk = PolySpace::orthonormal_basis(m, 4);
  auto pk1 = PolySpace::orthonormal_basis(m, 3);
  Rng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    Point x = {rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)};
    Point y = {rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)};
    Eigen::VectorXd bx = pk.basis_at(x), by = pk.basis_at(y);
    double slice = 0.0;
    for (int i = 0; i < pk.dim(); ++i)
      if (pk.basis_degree(i) == 4) slice += bx[i] * by[i];
    CHECK(pk.kernel(x, y) - slice == doctest::Approx(pk1.kernel(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("gauss-node gram identity (Christoffel-Darboux)") {
  // low degree through the default Cholesky path
  for (double a : {0.0, 0.5, 1.0}) {
    int k = 6;
    auto ps = PolySpace::orthonormal_basis(Measure::ball(1, a), k);
    auto nodes = gauss_nodes_1d(k + 1, a);
    std::vector<Point> pts;
    for (int i = 0; i <= k; ++i) pts.push_back(pt1(nodes.nodes[i]));
    Eigen::MatrixXd kern = ps.kernel_matrix(pts, pts);
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j) {
        double expected = i == j ? kern(i, i) : 0.0;
        CHECK(std::abs(kern(i, j) - expected) <=
              1e-10 * std::sqrt(kern(i, i) * kern(j, j)));
      }
  }
  // high degree through the recurrence path
  for (double a : {0.0, 0.5, 1.0}) {
    int k = 60;
    auto ps = PolySpace::recurrence_basis(Measure::ball(1, a), k);
    auto nodes = gauss_nodes_1d(k + 1, a);
    std::vector<Point> pts;
    for (int i = 0; i <= k; ++i) pts.push_back(pt1(nodes.nodes[i]));
    Eigen::MatrixXd g = ps.kernel_matrix(pts, pts);
    Eigen::VectorXd inv_sqrt(g.rows());
    for (int i = 0; i <= k; ++i) inv_sqrt[i] = 1.0 / std::sqrt(g(i, i));
    g = inv_sqrt.asDiagonal() * g * inv_sqrt.asDiagonal();
    g -= Eigen::MatrixXd::Identity(k + 1, k + 1);
    CHECK(g.cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("backend cross-check: recurrence vs cholesky kernels") {
  Rng rng(99);
  auto m = Measure::ball(1, 0.5);
  auto chol = PolySpace::orthonormal_basis(m, 10);
  auto chol_x = PolySpace::orthonormal_basis(m, 20, Precision::Extended);
  auto rec10 = PolySpace::recurrence_basis(m, 10);
  auto rec20 = PolySpace::recurrence_basis(m, 20);
  for (int rep = 0; rep < 25; ++rep) {
    double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
    double scale10 =
        std::sqrt(rec10.christoffel(pt1(x)).beta * rec10.christoffel(pt1(y)).beta);
    CHECK(std::abs(chol.kernel(pt1(x), pt1(y)) - rec10.kernel(pt1(x), pt1(y))) <=
          1e-9 * scale10);
    double scale20 =
        std::sqrt(rec20.christoffel(pt1(x)).beta * rec20.christoffel(pt1(y)).beta);
    CHECK(std::abs(chol_x.kernel(pt1(x), pt1(y)) - rec20.kernel(pt1(x), pt1(y))) <=
          1e-11 * scale20);
  }
}

TEST_CASE("precision caps: double path fails where extended succeeds") {
  auto m = Measure::ball(1, 0.5);
  CHECK_THROWS_AS(PolySpace::orthonormal_basis(m, 30), CapError);
  auto ext = PolySpace::orthonormal_basis(m, 25, Precision::Extended);
  CHECK(ext.orthonormality_residual() <= 1e-12);
}

TEST_CASE("orthonormality residual honors the per-precision contract") {
  CHECK(PolySpace::orthonormal_basis(Measure::ball(1, 0.5), 10).orthonormality_residual() <=
        1e-8);
  CHECK(PolySpace::orthonormal_basis(Measure::ball(2, 0.0), 5).orthonormality_residual() <=
        1e-8);
  CHECK(PolySpace::orthonormal_basis(Measure::ball(2, 0.5), 10, Precision::Extended)
            .orthonormality_residual() <= 1e-12);
  CHECK(PolySpace::orthonormal_basis(Measure::box(2, {{{-1.0, 1.0}}, {{-1.0, 1.0}}}), 8,
                                     Precision::Extended)
            .orthonormality_residual() <= 1e-12);
}

TEST_CASE("coefficient export: graded-lex header, one row per function") {
  auto ps = PolySpace::orthonormal_basis(Measure::ball(2, 0.5), 1);
  std::ostringstream ss;
  ps.export_coefficients_csv(ss);
  std::string out = ss.str();
  CHECK(out.find("basis,m0_0,m1_0,m0_1") == 0);
  int lines = 0;
  for (char c : out)
    if (c == '\n') ++lines;
  CHECK(lines == 4);  // header + dim rows

  auto rec = PolySpace::recurrence_basis(Measure::ball(1, 0.5), 3);
  CHECK_THROWS_AS(rec.coefficients(), std::invalid_argument);
}

TEST_CASE("diagonal estimate ratio table") {
  auto m = Measure::ball(1, 0.5);
  std::vector<Point> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(pt1(-0.98 + 1.96 * i / 49.0));

  // k = 0 stays finite and positive
  auto t0 = diagonal_estimate_ratio(m, {0}, grid);
  CHECK(t0.min_ratio() > 0.0);
  CHECK(std::isfinite(t0.max_ratio()));

  // beta_k(0) / k^n bounded above and below across k (d(0) = 1 branch)
  auto tc = diagonal_estimate_ratio(m, {5, 10, 20, 40, 80}, {pt1(0.0)});
  for (const auto& row : tc.rows) {
    CHECK(row.beta / row.k > 0.3);
    CHECK(row.beta / row.k < 0.4);
  }

  // spread at each k is a bounded constant; range frozen from the oracle run
  auto tbl = diagonal_estimate_ratio(m, {5, 10, 20, 40}, grid);
  for (int k : {5, 10, 20, 40}) {
    CHECK(tbl.spread_at(k) > 1.0);
    CHECK(tbl.spread_at(k) < 2.5);
  }
}

TEST_CASE("kernel agrees with the direct Gram-solve route") {
  // K(x, y) = mono(x)^T G^{-1} mono(y) in the monomial basis: an
  // independent route through the same moments, no Cholesky involved
  auto m = Measure::ball(2, 1.0);
  int k = 6;
  auto ps = PolySpace::orthonormal_basis(m, k);
  auto idx = enumerate_multiindices(2, k);
  int dim = static_cast<int>(idx.size());
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      MultiIndex sum{{idx[i].exponents[0] + idx[j].exponents[0],
                      idx[i].exponents[1] + idx[j].exponents[1]}};
      g(i, j) = m.moment(sum);
    }
  auto mono_at = [&](const Point& p) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i)
      v[i] = std::pow(p[0], idx[i].exponents[0]) * std::pow(p[1], idx[i].exponents[1]);
    return v;
  };
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  Rng rng(64);
  for (int rep = 0; rep < 10; ++rep) {
    Point x = {rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)};
    Point y = {rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)};
    double direct = mono_at(x).dot(llt.solve(mono_at(y)));
    CHECK(ps.kernel(x, y) == doctest::Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("trace identity: int K(x,x) dmu = dim P_k") {
  for (int n : {1, 2}) {
    for (double a : {0.0, 1.0}) {
      auto m = Measure::ball(n, a);
      int k = 7;
      auto ps = PolySpace::orthonormal_basis(m, k, Precision::Extended);
      double trace = m.integrate(
          [&](std::span<const double> x) { return ps.christoffel(x).beta; }, 2 * k);
      CHECK(trace == doctest::Approx(ps.dim()).epsilon(1e-11));
    }
  }
}

TEST_CASE("near-corner flags on box domains") {
  auto box = Measure::box(2, {{{-1.0, 1.0}}, {{-1.0, 1.0}}});
  std::vector<Point> grid = {{0.95, 0.95}, {0.0, 0.95}, {0.0, 0.0}};
  auto tbl = diagonal_estimate_ratio(box, {3}, grid, Precision::Double);
  REQUIRE(tbl.rows.size() == 3);
  CHECK(tbl.rows[0].near_corner);
  CHECK(!tbl.rows[1].near_corner);
  CHECK(!tbl.rows[2].near_corner);
}
