#include "mzkit/localized.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mzkit/geometry.hpp"

namespace mzkit {

double cutoff_hat(double t) {
  if (t < 0.0) throw std::invalid_argument("cutoff_hat: t must be >= 0");
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  double up = f(2.0 - t);
  return up / (up + f(t - 1.0));
}

LocalizedKernel LocalizedKernel::build(const Measure& ball_measure, int k, Precision p) {
  if (ball_measure.kind() != MeasureKind::Ball)
    throw std::invalid_argument("LocalizedKernel: measure must be a ball measure");
  if (k < 0) throw std::invalid_argument("LocalizedKernel: k must be >= 0");
  // the cutoff vanishes from degree 2k on, so the ladder stops there exactly
  LocalizedKernel lk(PolySpace::auto_basis(ball_measure, std::max(1, 2 * k), p));
  lk.k_ = k;
  lk.filter_.resize(lk.space_.dim());
  for (int i = 0; i < lk.space_.dim(); ++i) {
    double t = k > 0 ? static_cast<double>(lk.space_.basis_degree(i)) / k : (lk.space_.basis_degree(i) > 0 ? 2.0 : 0.0);
    lk.filter_[i] = cutoff_hat(t);
  }
  return lk;
}

double LocalizedKernel::eval(std::span<const double> x, std::span<const double> y) const {
  Eigen::VectorXd bx = space_.basis_at(x);
  Eigen::VectorXd by = space_.basis_at(y);
  double acc = 0.0;
  for (int i = 0; i < space_.dim(); ++i) acc += filter_[i] * bx[i] * by[i];
  return acc;
}

double LocalizedKernel::diag(std::span<const double> x) const {
  Eigen::VectorXd bx = space_.basis_at(x);
  double acc = 0.0;
  for (int i = 0; i < space_.dim(); ++i) acc += filter_[i] * bx[i] * bx[i];
  return acc;
}

double LocalizedKernel::normalization() const {
  // b solves  b * int L(x0, y) dmu(y) = 1  for the constant polynomial
  const Measure& m = space_.measure();
  QuadratureRule q = m.quadrature(std::max(1, 2 * space_.degree()));
  Point x0(m.dim(), 0.0);
  double acc = 0.0;
  Point y(m.dim());
  for (Eigen::Index i = 0; i < q.points.rows(); ++i) {
    for (int t = 0; t < m.dim(); ++t) y[t] = q.points(i, t);
    acc += q.weights[i] * eval(x0, y);
  }
  return 1.0 / acc;
}

double LocalizedKernel::beta_k(std::span<const double> x) const {
  Eigen::VectorXd bx = space_.basis_at(x);
  int d = space_.dim_of_degree(k_);
  double acc = 0.0;
  for (int i = 0; i < d; ++i) acc += bx[i] * bx[i];
  return acc;
}

double LocalizedKernel::beta_2k(std::span<const double> x) const {
  Eigen::VectorXd bx = space_.basis_at(x);
  return bx.squaredNorm();
}

DecayProfile decay_profile(const LocalizedKernel& lk, std::span<const double> x0,
                           std::span<const double> ray, int samples, double k_rho_max) {
  if (samples < 8) throw std::invalid_argument("decay_profile: need at least 8 samples");
  const int k = lk.degree();
  const int n = static_cast<int>(x0.size());
  double rn = 0.0;
  for (double v : ray) rn += v * v;
  if (!(rn > 0.0)) throw std::invalid_argument("decay_profile: ray must be nonzero");
  rn = std::sqrt(rn);

  // walk the ray to the boundary, bracketing each target rho by bisection
  // (rho is monotone along a ray from x0)
  double t_hi = 0.0;
  {
    double lo = 0.0, hi = 2.0 / rn;  // beyond the ball for sure
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      double nrm = 0.0;
      for (int t = 0; t < n; ++t) {
        double y = x0[t] + mid * ray[t];
        nrm += y * y;
      }
      if (nrm <= 1.0)
        lo = mid;
      else
        hi = mid;
    }
    t_hi = lo;
  }
  Point yhi(n);
  for (int t = 0; t < n; ++t) yhi[t] = x0[t] + t_hi * ray[t];
  double max_reachable = k * rho(x0, yhi);
  double cap = std::min(k_rho_max, max_reachable);

  DecayProfile out;
  double b0 = lk.beta_k(x0);
  Point y(n);
  bool plateau_alive = true;
  for (int s = 1; s <= samples; ++s) {
    double target = cap * s / samples;
    // bisect t so that k*rho(x0, x0 + t*ray) = target
    double lo = 0.0, hi = t_hi;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (lo + hi);
      for (int t = 0; t < n; ++t) y[t] = x0[t] + mid * ray[t];
      (k * rho(x0, y) < target ? lo : hi) = mid;
    }
    for (int t = 0; t < n; ++t) y[t] = x0[t] + 0.5 * (lo + hi) * ray[t];
    DecaySample sample;
    sample.k_rho = k * rho(x0, y);
    double value = lk.eval(x0, y);
    double beta_y = lk.beta_k(y);
    sample.normalized = std::abs(value) / std::sqrt(b0 * beta_y);
    if (plateau_alive && value >= 0.5 * beta_y)
      out.plateau_k_rho = sample.k_rho;
    else
      plateau_alive = false;
    out.table.push_back(sample);
  }

  // slope of log(normalized) vs log(1 + k rho) over the window
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& sm : out.table) {
    if (sm.k_rho < out.fit_lo || sm.k_rho > out.fit_hi || !(sm.normalized > 0.0)) continue;
    double lx = std::log1p(sm.k_rho), ly = std::log(sm.normalized);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt >= 2) {
    double denom = cnt * sxx - sx * sx;
    if (denom != 0.0) out.exponent = -(cnt * sxy - sx * sy) / denom;
  }
  return out;
}

std::vector<IntegralEstimateRow> integral_estimate_check(const Measure& ball_measure, int k,
                                                         double alpha, double gamma,
                                                         const std::vector<Point>& grid,
                                                         Precision p) {
  if (!(alpha > 0.0)) throw std::invalid_argument("integral_estimate_check: alpha must be > 0");
  if (ball_measure.kind() != MeasureKind::Ball)
    throw std::invalid_argument("integral_estimate_check: ball measures only");
  PolySpace ps = PolySpace::auto_basis(ball_measure, k, p);
  const int n = ball_measure.dim();
  const double a = ball_measure.exponent();

  std::vector<IntegralEstimateRow> rows;
  std::vector<std::vector<double>> passes;
  if (n == 1) {
    // y = sin(phi) turns the weight into cos(phi)^(2a) and rho(x, y) into
    // |phi_x - phi|; splitting at phi_x removes the kink, so a per-piece
    // Gauss-Legendre rule converges fast
    for (int nodes : {256, 512}) {
      Rule1D gl = gauss_jacobi(nodes, 0.0, 0.0);
      std::vector<double> vals;
      for (const auto& x : grid) {
        double phix = std::asin(std::max(-1.0, std::min(1.0, x[0])));
        double acc = 0.0;
        for (auto [lo, hi] : {std::pair{-0.5 * M_PI, phix}, std::pair{phix, 0.5 * M_PI}}) {
          double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
          for (int i = 0; i < gl.nodes.size(); ++i) {
            double phi = mid + half * gl.nodes[i];
            Point y{std::sin(phi)};
            double beta = ps.christoffel(y).beta;
            acc += half * gl.weights[i] * std::pow(beta, alpha) *
                   std::pow(std::cos(phi), 2.0 * a) /
                   std::pow(1.0 + k * std::abs(phix - phi), gamma);
          }
        }
        vals.push_back(acc * std::pow(ps.christoffel(x).beta, 1.0 - alpha));
      }
      passes.push_back(std::move(vals));
    }
  } else {
    // no kink-free split in higher dimensions; refine the product rule and
    // report any leftover disagreement through the converged flag
    for (int order : {8 * k + 32, 16 * k + 64}) {
      QuadratureRule q = ball_measure.quadrature(order);
      std::vector<Point> nodes(q.points.rows(), Point(n));
      for (Eigen::Index i = 0; i < q.points.rows(); ++i)
        for (int t = 0; t < n; ++t) nodes[i][t] = q.points(i, t);
      std::vector<double> beta(nodes.size());
      for (std::size_t i = 0; i < nodes.size(); ++i) beta[i] = ps.christoffel(nodes[i]).beta;
      std::vector<double> vals;
      vals.reserve(grid.size());
      for (const auto& x : grid) {
        double bx = ps.christoffel(x).beta;
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
          acc += q.weights[i] * std::pow(beta[i], alpha) /
                 std::pow(1.0 + k * rho(x, nodes[i]), gamma);
        vals.push_back(acc * std::pow(bx, 1.0 - alpha));
      }
      passes.push_back(std::move(vals));
    }
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    IntegralEstimateRow row;
    row.k = k;
    row.x = grid[g];
    row.value = passes.back()[g];
    double ref = std::abs(passes.back()[g]);
    row.converged = std::abs(passes[0][g] - passes[1][g]) <= 0.01 * std::max(ref, 1e-300);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mzkit
