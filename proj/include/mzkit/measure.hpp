#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mzkit/dd.hpp"

namespace mzkit {

using Point = std::vector<double>;

/// Monomial exponent tuple. Ordering throughout the library is graded
/// lexicographic: ascending total degree, and within a degree descending
/// lexicographic on the exponent tuple, so that x1^d comes first.
struct MultiIndex {
  std::vector<int> exponents;

  int degree() const {
    int d = 0;
    for (int e : exponents) d += e;
    return d;
  }
  bool operator==(const MultiIndex&) const = default;
};

/// All multi-indices of length n with total degree <= k, graded-lex sorted.
/// Returns exactly C(n+k, n) entries.
std::vector<MultiIndex> enumerate_multiindices(int n, int k);

double binomial(int n, int k);

enum class MeasureKind { Ball, Box, Ellipsoid };

/// 1D Gauss rule: nodes ascending, weights positive.
struct Rule1D {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss rule for the Jacobi weight (1-x)^alpha (1+x)^beta on [-1,1],
/// via the symmetric tridiagonal eigenproblem. Exact to degree 2m-1.
Rule1D gauss_jacobi(int m, double alpha, double beta);

/// Cubature rule over the support of a Measure; exact for all polynomials
/// of total degree <= exactness against the measure.
struct QuadratureRule {
  Eigen::MatrixXd points;   // npts x n
  Eigen::VectorXd weights;  // npts
  int exactness = 0;

  /// Max gap to a nearest neighbour over nodes (a mesh-size indicator).
  double mesh() const;
};

/// An admissible reference measure: the weighted ball
/// d mu = (1-|x|^2)^(a-1/2) dV on the unit ball (a >= 0), or Lebesgue
/// measure on a box or on an ellipsoid. Immutable after construction.
class Measure {
 public:
  static Measure ball(int n, double a);
  static Measure box(int n, std::vector<std::array<double, 2>> bounds);
  static Measure ellipsoid(int n, std::vector<double> semiaxes);

  MeasureKind kind() const { return kind_; }
  int dim() const { return n_; }

  /// Ball weight exponent a; 1/2 for the Lebesgue model domains (their
  /// diagonal estimates match the ball with a = 1/2).
  double exponent() const { return a_; }
  double effective_exponent() const { return kind_ == MeasureKind::Ball ? a_ : 0.5; }

  const std::vector<std::array<double, 2>>& bounds() const { return bounds_; }
  const std::vector<double>& semiaxes() const { return semiaxes_; }

  /// Total mass, exact (closed form).
  double mass() const;

  bool contains(std::span<const double> x, double tol = 1e-12) const;

  /// Exact monomial moment  int x^alpha dmu. Zero whenever some exponent is
  /// odd on a symmetric axis. Gamma ratios are evaluated in log domain.
  double moment(const MultiIndex& alpha) const;

  /// Extended-precision moment. The overall mass constant carries double
  /// accuracy (it scales the whole Gram uniformly); all moment ratios are
  /// exact products evaluated in double-double.
  DD moment_dd(const MultiIndex& alpha) const;

  /// Product cubature rule exact to total degree `order`. Throws CapError
  /// ("order too large") when the node count would exceed node_cap.
  QuadratureRule quadrature(int order, std::size_t node_cap = kDefaultNodeCap) const;

  /// Integrates f against the measure with a rule exact to `order`.
  double integrate(const std::function<double(std::span<const double>)>& f, int order,
                   std::size_t node_cap = kDefaultNodeCap) const;

  static constexpr std::size_t kDefaultNodeCap = 8'000'000;

 private:
  Measure() = default;

  MeasureKind kind_ = MeasureKind::Ball;
  int n_ = 1;
  double a_ = 0.5;
  std::vector<std::array<double, 2>> bounds_;
  std::vector<double> semiaxes_;
};

}  // namespace mzkit
