#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mzkit/dd.hpp"
#include "mzkit/measure.hpp"

namespace mzkit {

enum class Precision { Double, Extended };
enum class BasisBackend { Cholesky, Recurrence1D };

struct Christoffel {
  double beta;      // K_k(x, x)
  double inv_beta;  // the Christoffel function 1/K_k(x, x)
};

/// Orthonormal basis of (P_k, L^2(mu)) together with kernel evaluation.
///
/// The default construction assembles the exact-moment Gram matrix in
/// graded-lex monomial order and Cholesky-factors it in order (so the
/// coefficient matrix stays lower triangular and degrees are nested);
/// pivots are monitored against a relative threshold and falling below it
/// raises CapError, which signals the precision cap for that degree.
/// The Extended precision variant assembles and factors in double-double
/// and also accumulates basis evaluations in double-double, which is what
/// keeps the orthonormality residual near 1e-12 at degrees where plain
/// doubles are exhausted.
///
/// For 1-d ball measures a recurrence backend evaluates the classical
/// orthogonal-polynomial ONB directly; it is the cross-check oracle for the
/// Cholesky path and the only viable evaluation route at high degree.
/// Immutable after construction; all evaluations are const and thread-safe.
class PolySpace {
 public:
  static PolySpace orthonormal_basis(const Measure& m, int k,
                                     Precision p = Precision::Double);
  static PolySpace recurrence_basis(const Measure& m, int k);

  /// Backend used by the composite diagnostics: recurrence for 1-d ball
  /// measures, Cholesky at the requested precision otherwise.
  static PolySpace auto_basis(const Measure& m, int k, Precision p = Precision::Extended);

  int degree() const { return k_; }
  int dim() const { return dim_; }
  const Measure& measure() const { return measure_; }
  BasisBackend backend() const { return backend_; }
  Precision precision() const { return precision_; }

  /// Values of the orthonormal basis (phi_1, ..., phi_dim) at x.
  Eigen::VectorXd basis_at(std::span<const double> x) const;

  /// dim x npts matrix of basis values.
  Eigen::MatrixXd basis_matrix(const std::vector<Point>& xs) const;

  /// K_k(x, y) = sum_j phi_j(x) phi_j(y). Symmetric bitwise in (x, y).
  double kernel(std::span<const double> x, std::span<const double> y) const;

  /// Matrix of kernel values over two point lists (|xs| x |ys|).
  Eigen::MatrixXd kernel_matrix(const std::vector<Point>& xs,
                                const std::vector<Point>& ys) const;

  Christoffel christoffel(std::span<const double> x) const;

  /// Total degree of basis function i (the ONB is graded).
  int basis_degree(int i) const;

  /// dim P_j for j <= degree(); the first dim_of_degree(j) basis functions
  /// span P_j exactly.
  int dim_of_degree(int j) const;

  bool has_coefficients() const { return backend_ == BasisBackend::Cholesky; }
  const std::vector<MultiIndex>& monomials() const { return monomials_; }
  const Eigen::MatrixXd& coefficients() const;

  /// CSV export: one row per basis function, one column per monomial in
  /// graded-lex order.
  void export_coefficients_csv(std::ostream& os) const;

  /// max_ij |<phi_i, phi_j> - delta_ij| via quadrature exact to 2k.
  double orthonormality_residual() const;

 private:
  PolySpace(const Measure& m, int k) : measure_(m), k_(k) {}

  Measure measure_;
  int k_ = 0;
  int dim_ = 0;
  BasisBackend backend_ = BasisBackend::Cholesky;
  Precision precision_ = Precision::Double;
  std::vector<MultiIndex> monomials_;

  // Cholesky backend
  Eigen::MatrixXd coeffs_;       // lower triangular, rows = basis functions
  std::vector<DD> coeffs_dd_;    // row-major, Extended only

  // recurrence backend (n = 1)
  std::vector<double> rec_diag_;
  std::vector<double> rec_off_;  // sqrt(b_k)
  double rec_mass_ = 0.0;
};

/// Gauss nodes/weights for the weight (1-x^2)^(a-1/2) on [-1,1]; exact to
/// degree 2m-1. The nodes are the zeros of the degree-m orthogonal
/// polynomial for that weight.
Rule1D gauss_nodes_1d(int m, double a);

struct DiagonalRatioRow {
  int k = 0;
  Point x;
  double beta = 0.0;       // K_k(x,x)
  double predicted = 0.0;  // min(k_eff^n / d(x)^a_eff, k_eff^(n+2 a_eff))
  double ratio = 0.0;
  bool near_corner = false;  // box domains: at least two small face margins
};

struct DiagonalRatioTable {
  std::vector<DiagonalRatioRow> rows;
  /// max ratio / min ratio over the grid at one level k.
  double spread_at(int k) const;
  double min_ratio() const;
  double max_ratio() const;
};

/// Empirical two-sided comparability of the kernel diagonal against the
/// boundary-distance law, tabulated over degrees and a grid. Degrees enter
/// through max(k, 1) so the k = 0 row stays finite.
DiagonalRatioTable diagonal_estimate_ratio(const Measure& m, const std::vector<int>& ks,
                                           const std::vector<Point>& grid,
                                           Precision p = Precision::Extended);

}  // namespace mzkit
