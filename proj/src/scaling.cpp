#include "mzkit/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mzkit/rng.hpp"

namespace mzkit {

namespace {

constexpr double kSeriesCrossover = 10.0;

// J_nu(t)/t^nu by the power series around 0:
//   2^-nu sum_m (-1)^m (t^2/4)^m / (m! Gamma(nu+m+1))
double jstar_series(double nu, double t) {
  double q = 0.25 * t * t;
  double term = std::exp(-nu * std::log(2.0) - std::lgamma(nu + 1.0));
  double acc = term;
  for (int m = 1; m < 200; ++m) {
    term *= -q / (m * (nu + m));
    acc += term;
    if (std::abs(term) < 1e-18 * std::abs(acc) + 1e-300) break;
  }
  return acc;
}

}  // namespace

double jstar(double nu, double t) {
  if (nu < 0.5) throw std::invalid_argument("jstar: nu must be >= 1/2");
  if (t < 0.0) throw std::invalid_argument("jstar: t must be >= 0");
  if (t > 200.0) throw std::invalid_argument("jstar: t beyond the supported range");
  if (t <= kSeriesCrossover) return jstar_series(nu, t);
  return std::cyl_bessel_j(nu, t) / std::pow(t, nu);
}

double bessel_j(double nu, double t) {
  if (t <= kSeriesCrossover) return jstar_series(nu, t) * std::pow(t, nu);
  return std::cyl_bessel_j(nu, t);
}

std::vector<double> bessel_zeros(double nu, double tmax) {
  std::vector<double> zeros;
  const double step = 0.25;
  double prev_t = step * 0.5;  // start away from the t=0 zero of J_nu
  double prev_v = bessel_j(nu, prev_t);
  for (double t = prev_t + step; t <= tmax + step; t += step) {
    double v = bessel_j(nu, t);
    if (prev_v == 0.0) {
      zeros.push_back(prev_t);
    } else if (v * prev_v < 0.0) {
      double lo = prev_t, hi = t;
      for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        double vm = bessel_j(nu, mid);
        if (vm == 0.0) {
          lo = hi = mid;
          break;
        }
        (vm * prev_v < 0.0 ? hi : lo) = mid;
        if (hi - lo < 1e-13) break;
      }
      zeros.push_back(0.5 * (lo + hi));
    }
    prev_t = t;
    prev_v = v;
  }
  while (!zeros.empty() && zeros.back() > tmax) zeros.pop_back();
  return zeros;
}

BesselProfile BesselProfile::make(int n, double tmax) {
  BesselProfile p;
  p.nu = 0.5 * n;
  p.zeros = bessel_zeros(p.nu, tmax);
  return p;
}

std::vector<ScalingErrorRow> scaling_error(const Measure& ball_measure,
                                           const std::vector<int>& ks, double R,
                                           int grid_count) {
  if (ball_measure.kind() != MeasureKind::Ball)
    throw std::invalid_argument("scaling_error: ball measures only");
  if (grid_count < 2) throw std::invalid_argument("scaling_error: grid_count must be >= 2");
  const int n = ball_measure.dim();
  int kmin = *std::min_element(ks.begin(), ks.end());
  if (kmin < 1 || R / kmin > 0.25)
    throw std::invalid_argument("scaling_error: R/k_min must stay within the bulk (<= 1/4)");
  const double nu = 0.5 * n;
  const double jstar0 = jstar(nu, 0.0);

  // grid of [-R, R]^n
  std::vector<Point> grid;
  std::vector<int> ix(n, 0);
  while (true) {
    Point u(n);
    for (int t = 0; t < n; ++t) u[t] = -R + 2.0 * R * ix[t] / (grid_count - 1);
    grid.push_back(std::move(u));
    int t = n - 1;
    for (; t >= 0; --t) {
      if (++ix[t] < grid_count) break;
      ix[t] = 0;
    }
    if (t < 0) break;
  }

  std::vector<ScalingErrorRow> rows;
  Point origin(n, 0.0);
  for (int k : ks) {
    PolySpace ps = PolySpace::auto_basis(ball_measure, k);
    std::vector<Point> scaled(grid.size(), Point(n));
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (int t = 0; t < n; ++t) scaled[i][t] = grid[i][t] / k;
    Eigen::MatrixXd b = ps.basis_matrix(scaled);
    double k00 = ps.christoffel(origin).beta;
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (std::size_t j = 0; j < grid.size(); ++j) {
        double kk = b.col(i).dot(b.col(j)) / k00;
        double d = 0.0;
        for (int t = 0; t < n; ++t) d += (grid[i][t] - grid[j][t]) * (grid[i][t] - grid[j][t]);
        double target = jstar(nu, std::sqrt(d)) / jstar0;
        sup = std::max(sup, std::abs(kk - target));
      }
    rows.push_back({k, sup});
  }
  return rows;
}

ZeroDistanceReport bessel_zero_distance_test(const std::vector<Point>& X, double nu, double tol) {
  if (X.size() < 2) throw std::invalid_argument("bessel_zero_distance_test: need at least 2 points");
  double maxd = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i + 1; j < X.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t t = 0; t < X[i].size(); ++t)
        d2 += (X[i][t] - X[j][t]) * (X[i][t] - X[j][t]);
      maxd = std::max(maxd, std::sqrt(d2));
    }
  auto zeros = bessel_zeros(nu, maxd + 10.0);
  ZeroDistanceReport rep;
  rep.tol = tol;
  rep.compatible = true;
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = i + 1; j < X.size(); ++j) {
      ZeroDistancePair pr;
      pr.i = i;
      pr.j = j;
      double d2 = 0.0;
      for (std::size_t t = 0; t < X[i].size(); ++t)
        d2 += (X[i][t] - X[j][t]) * (X[i][t] - X[j][t]);
      pr.distance = std::sqrt(d2);
      double best = std::numeric_limits<double>::infinity();
      for (double z : zeros) {
        if (std::abs(pr.distance - z) < best) {
          best = std::abs(pr.distance - z);
          pr.nearest_zero = z;
        }
      }
      pr.offset = best;
      if (!(best <= tol)) rep.compatible = false;
      rep.pairs.push_back(pr);
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Orthogonality residual search
// ---------------------------------------------------------------------------

namespace {

// Gram off-diagonal Frobenius mass of the normalized kernels at the
// configuration, after projecting every point into the closed ball; plus a
// quadratic penalty for the projection distance to keep iterates inside.
class Objective {
 public:
  Objective(const PolySpace& ps, int m) : ps_(ps), m_(m), n_(ps.measure().dim()) {}

  double operator()(const std::vector<double>& z) const {
    std::vector<Point> pts(m_, Point(n_));
    double penalty = 0.0;
    for (int i = 0; i < m_; ++i) {
      double norm2 = 0.0;
      for (int t = 0; t < n_; ++t) {
        pts[i][t] = z[static_cast<std::size_t>(i) * n_ + t];
        norm2 += pts[i][t] * pts[i][t];
      }
      if (norm2 > 1.0) {
        double norm = std::sqrt(norm2);
        for (int t = 0; t < n_; ++t) pts[i][t] /= norm;
        penalty += (norm - 1.0) * (norm - 1.0);
      }
    }
    return residual(pts) + 10.0 * penalty;
  }

  double residual(const std::vector<Point>& pts) const {
    Eigen::MatrixXd b = ps_.basis_matrix(pts);
    Eigen::MatrixXd kern = b.transpose() * b;
    double acc = 0.0;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) {
        if (i == j) continue;
        double g = kern(i, j) * kern(i, j) / (kern(i, i) * kern(j, j));
        acc += g;
      }
    return acc;
  }

  std::vector<Point> project(const std::vector<double>& z) const {
    std::vector<Point> pts(m_, Point(n_));
    for (int i = 0; i < m_; ++i) {
      double norm2 = 0.0;
      for (int t = 0; t < n_; ++t) {
        pts[i][t] = z[static_cast<std::size_t>(i) * n_ + t];
        norm2 += pts[i][t] * pts[i][t];
      }
      if (norm2 > 1.0) {
        double norm = std::sqrt(norm2);
        for (int t = 0; t < n_; ++t) pts[i][t] /= norm;
      }
    }
    return pts;
  }

 private:
  const PolySpace& ps_;
  int m_;
  int n_;
};

struct NmOutcome {
  std::vector<double> best;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// textbook Nelder-Mead with deterministic tie-breaking
NmOutcome nelder_mead(const Objective& f, std::vector<double> x0, double scale,
                      int max_iter) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> simplex(d + 1, x0);
  for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += scale;
  std::vector<double> val(d + 1);
  for (std::size_t i = 0; i <= d; ++i) val[i] = f(simplex[i]);

  std::vector<std::size_t> order(d + 1);
  NmOutcome out;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    for (std::size_t i = 0; i <= d; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    double best = val[order[0]], worst = val[order[d]];
    if (worst - best < 1e-15 * (1.0 + std::abs(best))) {
      out.converged = true;
      break;
    }
    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t t = 0; t < d; ++t) centroid[t] += simplex[order[i]][t] / d;
    auto blend = [&](double c) {
      std::vector<double> p(d);
      for (std::size_t t = 0; t < d; ++t)
        p[t] = centroid[t] + c * (simplex[order[d]][t] - centroid[t]);
      return p;
    };
    auto refl = blend(-1.0);
    double fr = f(refl);
    if (fr < val[order[0]]) {
      auto exp_ = blend(-2.0);
      double fe = f(exp_);
      if (fe < fr) {
        simplex[order[d]] = exp_;
        val[order[d]] = fe;
      } else {
        simplex[order[d]] = refl;
        val[order[d]] = fr;
      }
    } else if (fr < val[order[d - 1]]) {
      simplex[order[d]] = refl;
      val[order[d]] = fr;
    } else {
      auto con = blend(0.5);
      double fc = f(con);
      if (fc < val[order[d]]) {
        simplex[order[d]] = con;
        val[order[d]] = fc;
      } else {
        for (std::size_t i = 1; i <= d; ++i) {
          for (std::size_t t = 0; t < d; ++t)
            simplex[order[i]][t] = 0.5 * (simplex[order[i]][t] + simplex[order[0]][t]);
          val[order[i]] = f(simplex[order[i]]);
        }
      }
    }
  }
  std::size_t bi = 0;
  for (std::size_t i = 1; i <= d; ++i)
    if (val[i] < val[bi]) bi = i;
  out.best = simplex[bi];
  out.value = val[bi];
  out.iterations = iter;
  return out;
}

}  // namespace

SearchResult orthogonality_residual_search(const Measure& ball_measure, int k, int m,
                                           std::uint64_t seed, int restarts,
                                           const std::vector<Point>* init,
                                           int max_iterations, Precision p) {
  if (ball_measure.kind() != MeasureKind::Ball)
    throw std::invalid_argument("orthogonality_residual_search: ball measures only");
  PolySpace ps = PolySpace::auto_basis(ball_measure, k, p);
  if (m < 1 || m > ps.dim())
    throw std::invalid_argument("orthogonality_residual_search: need 1 <= m <= dim P_k");
  const int n = ball_measure.dim();
  Objective obj(ps, m);

  SearchResult result;
  result.seed = seed;
  result.best_residual = std::numeric_limits<double>::infinity();

  for (int r = 0; r < std::max(1, restarts); ++r) {
    std::vector<double> z(static_cast<std::size_t>(m) * n);
    if (r == 0 && init) {
      if (static_cast<int>(init->size()) != m)
        throw std::invalid_argument("orthogonality_residual_search: init size mismatch");
      for (int i = 0; i < m; ++i)
        for (int t = 0; t < n; ++t) z[static_cast<std::size_t>(i) * n + t] = (*init)[i][t];
    } else {
      Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(r));
      for (int i = 0; i < m; ++i) {
        auto pt = rng.in_ball(n);
        for (int t = 0; t < n; ++t) z[static_cast<std::size_t>(i) * n + t] = 0.95 * pt[t];
      }
    }
    // keep the best of the initial configuration and the NM output
    double f0 = obj(z);
    NmOutcome nm = nelder_mead(obj, z, 0.15 / std::max(1, k), max_iterations);
    RestartStat stat;
    stat.restart = r;
    stat.iterations = nm.iterations;
    stat.converged = nm.converged;
    const std::vector<double>& zbest = (nm.value <= f0) ? nm.best : z;
    auto pts = obj.project(zbest);
    stat.residual = obj.residual(pts);
    // m == 1 has no pairs: the residual is exactly zero
    result.restarts.push_back(stat);
    if (stat.residual < result.best_residual) {
      result.best_residual = stat.residual;
      result.configuration = pts;
      result.best_restart = r;
    }
  }
  return result;
}

}  // namespace mzkit
