#include "mzkit/polyspace.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "mzkit/errors.hpp"
#include "mzkit/geometry.hpp"

namespace mzkit {

namespace {

constexpr double kPivotThresholdDouble = 1e-13;
// same margin over the double-double epsilon (~4.9e-32) that 1e-13 has
// over the double epsilon
constexpr double kPivotThresholdExtended = 1e-26;

// values of all monomials (graded-lex) at x, via per-coordinate power tables
void monomials_at(const std::vector<MultiIndex>& idx, std::span<const double> x, int k,
                  std::vector<double>& out) {
  const int n = static_cast<int>(x.size());
  static thread_local std::vector<double> pw;
  pw.assign(static_cast<std::size_t>(n) * (k + 1), 1.0);
  for (int t = 0; t < n; ++t)
    for (int p = 1; p <= k; ++p) pw[t * (k + 1) + p] = pw[t * (k + 1) + p - 1] * x[t];
  out.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double v = 1.0;
    for (int t = 0; t < n; ++t) v *= pw[t * (k + 1) + idx[i].exponents[t]];
    out[i] = v;
  }
}

// In-order Cholesky G = L L^T with pivot monitoring: processing columns in
// graded-lex order keeps L (and its inverse) lower triangular, so the basis
// stays degree-nested. A pivot below threshold * (largest pivot seen)
// signals numerical rank loss at this precision.
template <typename T>
std::vector<T> cholesky_in_order(std::vector<T> g, int dim, double threshold, int degree) {
  auto at = [&](int i, int j) -> T& { return g[static_cast<std::size_t>(i) * dim + j]; };
  double max_pivot = 0.0;
  for (int j = 0; j < dim; ++j) {
    T d = at(j, j);
    for (int t = 0; t < j; ++t) d = d - at(j, t) * at(j, t);
    double dv;
    if constexpr (std::is_same_v<T, DD>)
      dv = d.value();
    else
      dv = d;
    max_pivot = std::max(max_pivot, dv);
    if (!(dv > threshold * max_pivot))
      throw CapError("orthonormal_basis: Gram numerically singular at degree k=" +
                     std::to_string(degree));
    T l;
    if constexpr (std::is_same_v<T, DD>)
      l = sqrt(d);
    else
      l = std::sqrt(dv);
    at(j, j) = l;
    for (int i = j + 1; i < dim; ++i) {
      T s = at(i, j);
      for (int t = 0; t < j; ++t) s = s - at(i, t) * at(j, t);
      at(i, j) = s / l;
    }
  }
  // forward substitution: C = L^{-1}, lower triangular, written back in place
  std::vector<T> c(g.size(), T(0.0));
  auto cat = [&](int i, int j) -> T& { return c[static_cast<std::size_t>(i) * dim + j]; };
  for (int i = 0; i < dim; ++i) {
    cat(i, i) = T(1.0) / at(i, i);
    for (int j = i - 1; j >= 0; --j) {
      T s(0.0);
      for (int t = j; t < i; ++t) s = s - at(i, t) * cat(t, j);
      cat(i, j) = s / at(i, i);
    }
  }
  return c;
}

}  // namespace

PolySpace PolySpace::orthonormal_basis(const Measure& m, int k, Precision p) {
  if (k < 0) throw std::invalid_argument("orthonormal_basis: k must be >= 0");
  PolySpace ps(m, k);
  ps.backend_ = BasisBackend::Cholesky;
  ps.precision_ = p;
  ps.monomials_ = enumerate_multiindices(m.dim(), k);
  ps.dim_ = static_cast<int>(ps.monomials_.size());
  const int dim = ps.dim_;
  const int n = m.dim();

  MultiIndex sum;
  sum.exponents.resize(n);
  if (p == Precision::Double) {
    std::vector<double> g(static_cast<std::size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j <= i; ++j) {
        for (int t = 0; t < n; ++t)
          sum.exponents[t] = ps.monomials_[i].exponents[t] + ps.monomials_[j].exponents[t];
        double v = m.moment(sum);
        g[static_cast<std::size_t>(i) * dim + j] = v;
        g[static_cast<std::size_t>(j) * dim + i] = v;
      }
    auto c = cholesky_in_order<double>(std::move(g), dim, kPivotThresholdDouble, k);
    ps.coeffs_ = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                          Eigen::RowMajor>>(c.data(), dim, dim);
  } else {
    std::vector<DD> g(static_cast<std::size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j <= i; ++j) {
        for (int t = 0; t < n; ++t)
          sum.exponents[t] = ps.monomials_[i].exponents[t] + ps.monomials_[j].exponents[t];
        DD v = m.moment_dd(sum);
        g[static_cast<std::size_t>(i) * dim + j] = v;
        g[static_cast<std::size_t>(j) * dim + i] = v;
      }
    ps.coeffs_dd_ = cholesky_in_order<DD>(std::move(g), dim, kPivotThresholdExtended, k);
    ps.coeffs_.resize(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        ps.coeffs_(i, j) = ps.coeffs_dd_[static_cast<std::size_t>(i) * dim + j].value();
  }
  return ps;
}

PolySpace PolySpace::recurrence_basis(const Measure& m, int k) {
  if (m.dim() != 1 || m.kind() != MeasureKind::Ball)
    throw std::invalid_argument("recurrence_basis: requires a 1-d ball measure");
  if (k < 0) throw std::invalid_argument("recurrence_basis: k must be >= 0");
  PolySpace ps(m, k);
  ps.backend_ = BasisBackend::Recurrence1D;
  ps.monomials_ = enumerate_multiindices(1, k);
  ps.dim_ = k + 1;
  // shares the Jacobi-matrix recurrence with gauss_nodes_1d
  double al = m.exponent() - 0.5;
  Rule1D probe = gauss_jacobi(1, al, al);  // validates parameters
  (void)probe;
  ps.rec_diag_.assign(k + 2, 0.0);
  ps.rec_off_.assign(k + 2, 0.0);
  // recurrence coefficients: symmetric weight so the diagonal vanishes
  {
    double ab = 2.0 * al;
    ps.rec_mass_ = std::exp((ab + 1.0) * std::log(2.0) + 2.0 * std::lgamma(al + 1.0) -
                            std::lgamma(ab + 2.0));
    for (int j = 1; j <= k + 1; ++j) {
      double b;
      if (j == 1)
        b = 4.0 * (al + 1.0) * (al + 1.0) / ((ab + 2.0) * (ab + 2.0) * (ab + 3.0));
      else
        b = 4.0 * j * (j + al) * (j + al) * (j + ab) /
            ((2.0 * j + ab) * (2.0 * j + ab) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0));
      ps.rec_off_[j] = std::sqrt(b);
    }
  }
  return ps;
}

PolySpace PolySpace::auto_basis(const Measure& m, int k, Precision p) {
  if (m.dim() == 1 && m.kind() == MeasureKind::Ball) return recurrence_basis(m, k);
  return orthonormal_basis(m, k, p);
}

Eigen::VectorXd PolySpace::basis_at(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != measure_.dim())
    throw std::invalid_argument("basis_at: point dimension mismatch");
  Eigen::VectorXd out(dim_);
  if (backend_ == BasisBackend::Recurrence1D) {
    double t = x[0];
    out[0] = 1.0 / std::sqrt(rec_mass_);
    if (k_ >= 1) out[1] = t * out[0] / rec_off_[1];
    for (int j = 1; j < k_; ++j)
      out[j + 1] = (t * out[j] - rec_off_[j] * out[j - 1]) / rec_off_[j + 1];
    return out;
  }
  if (precision_ == Precision::Double) {
    static thread_local std::vector<double> mono;
    monomials_at(monomials_, x, k_, mono);
    Eigen::Map<const Eigen::VectorXd> mv(mono.data(), dim_);
    out.noalias() = coeffs_.triangularView<Eigen::Lower>() * mv;
    return out;
  }
  // fully double-double evaluation: monomial powers, products and sums all
  // carry ~32 digits, since ordinary double monomials would re-introduce
  // the conditioning loss the extended assembly avoids
  const int n = measure_.dim();
  static thread_local std::vector<DD> pw, mono_dd;
  pw.assign(static_cast<std::size_t>(n) * (k_ + 1), DD(1.0));
  for (int t = 0; t < n; ++t)
    for (int p = 1; p <= k_; ++p) pw[t * (k_ + 1) + p] = pw[t * (k_ + 1) + p - 1] * DD(x[t]);
  mono_dd.resize(monomials_.size());
  for (std::size_t i = 0; i < monomials_.size(); ++i) {
    DD v(1.0);
    for (int t = 0; t < n; ++t) v = v * pw[t * (k_ + 1) + monomials_[i].exponents[t]];
    mono_dd[i] = v;
  }
  for (int i = 0; i < dim_; ++i) {
    DD acc(0.0);
    const DD* row = coeffs_dd_.data() + static_cast<std::size_t>(i) * dim_;
    for (int j = 0; j <= i; ++j) acc = acc + row[j] * mono_dd[j];
    out[i] = acc.value();
  }
  return out;
}

Eigen::MatrixXd PolySpace::basis_matrix(const std::vector<Point>& xs) const {
  Eigen::MatrixXd out(dim_, static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = basis_at(xs[i]);
  return out;
}

double PolySpace::kernel(std::span<const double> x, std::span<const double> y) const {
  Eigen::VectorXd bx = basis_at(x);
  Eigen::VectorXd by = basis_at(y);
  // fixed ascending order; commutative products keep K(x,y) == K(y,x) bitwise
  double acc = 0.0;
  for (int j = 0; j < dim_; ++j) acc += bx[j] * by[j];
  return acc;
}

Eigen::MatrixXd PolySpace::kernel_matrix(const std::vector<Point>& xs,
                                         const std::vector<Point>& ys) const {
  Eigen::MatrixXd bx = basis_matrix(xs);
  Eigen::MatrixXd by = basis_matrix(ys);
  return bx.transpose() * by;
}

Christoffel PolySpace::christoffel(std::span<const double> x) const {
  Eigen::VectorXd b = basis_at(x);
  double beta = b.squaredNorm();
  return {beta, 1.0 / beta};
}

int PolySpace::basis_degree(int i) const { return monomials_[i].degree(); }

int PolySpace::dim_of_degree(int j) const {
  return static_cast<int>(binomial(measure_.dim() + j, measure_.dim()));
}

const Eigen::MatrixXd& PolySpace::coefficients() const {
  if (!has_coefficients())
    throw std::invalid_argument("coefficients: recurrence backend has no coefficient matrix");
  return coeffs_;
}

void PolySpace::export_coefficients_csv(std::ostream& os) const {
  const auto& c = coefficients();
  os << "basis";
  for (const auto& mi : monomials_) {
    os << ",m";
    for (std::size_t t = 0; t < mi.exponents.size(); ++t)
      os << (t ? "_" : "") << mi.exponents[t];
  }
  os << "\n";
  char buf[64];
  for (int i = 0; i < dim_; ++i) {
    os << i + 1;
    for (int j = 0; j < dim_; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", c(i, j));
      os << ',' << buf;
    }
    os << "\n";
  }
}

double PolySpace::orthonormality_residual() const {
  QuadratureRule q = measure_.quadrature(std::max(1, 2 * k_));
  std::vector<Point> pts(q.points.rows(), Point(measure_.dim()));
  for (Eigen::Index i = 0; i < q.points.rows(); ++i)
    for (int t = 0; t < measure_.dim(); ++t) pts[i][t] = q.points(i, t);
  Eigen::MatrixXd b = basis_matrix(pts);
  Eigen::MatrixXd gram = b * q.weights.asDiagonal() * b.transpose();
  gram -= Eigen::MatrixXd::Identity(dim_, dim_);
  return gram.cwiseAbs().maxCoeff();
}

Rule1D gauss_nodes_1d(int m, double a) {
  if (m < 1) throw std::invalid_argument("gauss_nodes_1d: m must be >= 1");
  if (a < 0.0) throw std::invalid_argument("gauss_nodes_1d: a must be >= 0");
  return gauss_jacobi(m, a - 0.5, a - 0.5);
}

double DiagonalRatioTable::spread_at(int k) const {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rows)
    if (r.k == k) {
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
    }
  if (!(lo > 0.0) || hi == 0.0) return 0.0;
  return hi / lo;
}

double DiagonalRatioTable::min_ratio() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) lo = std::min(lo, r.ratio);
  return lo;
}

double DiagonalRatioTable::max_ratio() const {
  double hi = 0.0;
  for (const auto& r : rows) hi = std::max(hi, r.ratio);
  return hi;
}

DiagonalRatioTable diagonal_estimate_ratio(const Measure& m, const std::vector<int>& ks,
                                           const std::vector<Point>& grid, Precision p) {
  DiagonalRatioTable table;
  const int n = m.dim();
  const double a_eff = m.effective_exponent();
  for (int k : ks) {
    PolySpace ps = PolySpace::auto_basis(m, k, p);
    for (const auto& x : grid) {
      DiagonalRatioRow row;
      row.k = k;
      row.x = x;
      row.beta = ps.christoffel(x).beta;
      double d = boundary_distance(m, x);
      double keff = std::max(k, 1);
      double bulk = std::pow(keff, n + 2.0 * a_eff);
      double edge = d > 0.0 ? std::pow(keff, n) / std::pow(d, a_eff) : bulk;
      row.predicted = std::min(edge, bulk);
      row.ratio = row.beta / row.predicted;
      if (m.kind() == MeasureKind::Box) {
        int small = 0;
        for (int t = 0; t < n; ++t) {
          double half = 0.5 * (m.bounds()[t][1] - m.bounds()[t][0]);
          double margin = std::min(x[t] - m.bounds()[t][0], m.bounds()[t][1] - x[t]);
          if (margin < 0.1 * half) ++small;
        }
        row.near_corner = small >= 2;
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace mzkit
