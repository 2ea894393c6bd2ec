#include "mzkit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "mzkit/errors.hpp"

namespace mzkit {

const PointFamily::Level* PointFamily::level(int k) const {
  for (const auto& l : levels)
    if (l.k == k) return &l;
  return nullptr;
}

void PointFamily::validate(const Measure& m) const {
  if (m.dim() != n) throw std::invalid_argument("PointFamily: dimension does not match measure");
  int prev = -1;
  for (const auto& l : levels) {
    if (l.k <= prev) throw std::invalid_argument("PointFamily: degrees must be strictly increasing");
    prev = l.k;
    for (const auto& p : l.points) {
      if (static_cast<int>(p.size()) != n)
        throw std::invalid_argument("PointFamily: point dimension mismatch");
      if (!m.contains(p, 1e-12))
        throw std::invalid_argument("PointFamily: point outside the closed domain");
    }
  }
}

DiscreteMeasure christoffel_weighted(const std::vector<Point>& points, const PolySpace& ps) {
  DiscreteMeasure mu;
  mu.atoms.reserve(points.size());
  for (const auto& p : points) {
    double beta = ps.christoffel(p).beta;
    mu.atoms.push_back({p, 1.0 / beta});
  }
  return mu;
}

double separation_constant(const PointFamily& fam, int k, const Measure& m) {
  const auto* lvl = fam.level(k);
  if (!lvl || lvl->points.size() < 2) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lvl->points.size(); ++i)
    for (std::size_t j = i + 1; j < lvl->points.size(); ++j)
      best = std::min(best, quasi_distance(m, lvl->points[i], lvl->points[j]));
  return k * best;
}

// ---------------------------------------------------------------------------
// Carleson net
// ---------------------------------------------------------------------------

namespace {

// Candidate grid with quasi-metric resolution ~h, deterministic order.
// Ball: rings of the lifted upper hemisphere (recursively for n >= 2);
// box: product of per-axis angle grids; ellipsoid: scaled ball grid.
void hemisphere_candidates(int n, double h, std::vector<Point>& out) {
  if (n == 1) {
    int steps = static_cast<int>(std::ceil(M_PI / h));
    for (int i = 0; i <= steps; ++i) {
      double phi = -0.5 * M_PI + M_PI * i / steps;
      out.push_back({std::sin(phi)});
    }
    return;
  }
  // polar angle from the equator: x = sin(psi) * xi, |xi| = 1
  int steps = static_cast<int>(std::ceil(0.5 * M_PI / h));
  for (int i = 0; i <= steps; ++i) {
    double psi = 0.5 * M_PI * i / steps;
    double r = std::sin(psi);
    if (i == 0) {
      out.push_back(Point(n, 0.0));
      continue;
    }
    // ring: sphere S^{n-1} of radius r, angular resolution h / r
    double hr = h / std::max(r, h);
    if (n == 2) {
      int m = std::max(4, static_cast<int>(std::ceil(2.0 * M_PI / hr)));
      for (int j = 0; j < m; ++j) {
        double th = 2.0 * M_PI * j / m;
        out.push_back({r * std::cos(th), r * std::sin(th)});
      }
    } else {
      // recursive lat-long grid on S^{n-1}
      std::vector<Point> sub;
      hemisphere_candidates(n - 1, hr, sub);  // lower-dim ball grid as chart
      for (auto& q : sub) {
        double nq = 0.0;
        for (double v : q) nq += v * v;
        double z = std::sqrt(std::max(0.0, 1.0 - nq));
        Point p(n);
        for (int t = 0; t < n - 1; ++t) p[t] = r * q[t];
        p[n - 1] = r * z;
        out.push_back(p);
        if (z > 1e-12) {
          Point pm = p;
          pm[n - 1] = -p[n - 1];
          out.push_back(pm);
        }
      }
    }
  }
}

std::vector<Point> carleson_candidates(const Measure& m, double h) {
  std::vector<Point> out;
  switch (m.kind()) {
    case MeasureKind::Ball:
      hemisphere_candidates(m.dim(), h, out);
      break;
    case MeasureKind::Box: {
      const int n = m.dim();
      int steps = static_cast<int>(std::ceil(M_PI / h));
      std::vector<int> ix(n, 0);
      while (true) {
        Point p(n);
        for (int t = 0; t < n; ++t) {
          double phi = -0.5 * M_PI + M_PI * ix[t] / steps;
          double mid = 0.5 * (m.bounds()[t][0] + m.bounds()[t][1]);
          double half = 0.5 * (m.bounds()[t][1] - m.bounds()[t][0]);
          p[t] = mid + half * std::sin(phi);
        }
        out.push_back(std::move(p));
        int t = n - 1;
        for (; t >= 0; --t) {
          if (++ix[t] <= steps) break;
          ix[t] = 0;
        }
        if (t < 0) break;
      }
      break;
    }
    case MeasureKind::Ellipsoid: {
      hemisphere_candidates(m.dim(), h, out);
      for (auto& p : out)
        for (int t = 0; t < m.dim(); ++t) p[t] *= m.semiaxes()[t];
      break;
    }
  }
  return out;
}

// Greedy thinning to a `spacing`-separated net, in candidate order. The
// quasi-distance dominates the Euclidean one, so a Euclidean cell hash of
// size `spacing` bounds the neighbourhood that must be checked.
std::vector<Point> greedy_net(const Measure& m, const std::vector<Point>& cand, double spacing,
                              std::size_t cap) {
  const int n = m.dim();
  std::map<std::vector<long>, std::vector<std::size_t>> cells;
  std::vector<Point> net;
  std::vector<long> key(n), probe(n);
  for (const auto& c : cand) {
    for (int t = 0; t < n; ++t) key[t] = static_cast<long>(std::floor(c[t] / spacing));
    bool ok = true;
    // scan the 3^n neighbourhood
    std::vector<int> off(n, -1);
    while (ok) {
      for (int t = 0; t < n; ++t) probe[t] = key[t] + off[t];
      auto it = cells.find(probe);
      if (it != cells.end()) {
        for (std::size_t idx : it->second) {
          if (quasi_distance(m, net[idx], c) < spacing) {
            ok = false;
            break;
          }
        }
      }
      int t = n - 1;
      for (; t >= 0; --t) {
        if (++off[t] <= 1) break;
        off[t] = -1;
      }
      if (t < 0) break;
    }
    if (!ok) continue;
    net.push_back(c);
    if (net.size() > cap) throw CapError("carleson_ratio: net too large");
    cells[key].push_back(net.size() - 1);
  }
  return net;
}

}  // namespace

CarlesonResult carleson_ratio(const DiscreteMeasure& mu, int k, const Measure& m,
                              CarlesonReference ref, std::size_t net_cap) {
  if (k < 1) throw std::invalid_argument("carleson_ratio: k must be >= 1");
  if (ref == CarlesonReference::Weighted && m.kind() != MeasureKind::Ball)
    throw std::invalid_argument("carleson_ratio: weighted reference requires a ball measure");
  const double spacing = 0.5 / k;
  const double eps = 1.0 / k;
  auto cand = carleson_candidates(m, spacing);
  auto net = greedy_net(m, cand, spacing, net_cap);

  CarlesonResult res;
  res.net_size = net.size();
  res.net_spacing = spacing;
  if (mu.atoms.empty()) return res;
  res.witness = net.empty() ? Point(m.dim(), 0.0) : net.front();
  for (const auto& x : net) {
    double mass = 0.0;
    for (const auto& atom : mu.atoms)
      if (quasi_distance(m, x, atom.x) < eps) mass += atom.mass;
    if (mass == 0.0) continue;
    BallVolumeProxy vol = metric_ball_volume(m, x, eps);
    double denom = ref == CarlesonReference::Lebesgue ? vol.lebesgue : vol.weighted;
    double ratio = mass / denom;
    if (ratio > res.sup_ratio) {
      res.sup_ratio = ratio;
      res.witness = x;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Spectral diagnostics
// ---------------------------------------------------------------------------

Eigen::MatrixXd gram_matrix(const std::vector<Point>& points, const PolySpace& ps) {
  if (points.empty()) throw std::invalid_argument("gram_matrix: no points at this level");
  Eigen::MatrixXd b = ps.basis_matrix(points);
  Eigen::MatrixXd kern = b.transpose() * b;
  Eigen::VectorXd inv_sqrt(points.size());
  for (Eigen::Index i = 0; i < kern.rows(); ++i) inv_sqrt[i] = 1.0 / std::sqrt(kern(i, i));
  Eigen::MatrixXd g = inv_sqrt.asDiagonal() * kern * inv_sqrt.asDiagonal();
  g.diagonal().setOnes();  // K(p,p)/beta(p) is exactly 1
  return g;
}

std::pair<double, double> riesz_bounds(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("riesz_bounds: eigen-solver failure");
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

FrameBoundsResult frame_bounds(const std::vector<Point>& points, const PolySpace& ps) {
  if (points.empty()) throw std::invalid_argument("frame_bounds: no points at this level");
  Eigen::MatrixXd a = ps.basis_matrix(points);  // dim x m
  for (Eigen::Index j = 0; j < a.cols(); ++j) a.col(j) /= a.col(j).norm();
  Eigen::MatrixXd s = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("frame_bounds: eigen-solver failure");
  FrameBoundsResult out;
  out.lower = std::max(0.0, es.eigenvalues().minCoeff());
  out.upper = std::max(0.0, es.eigenvalues().maxCoeff());
  double tol = 1e-12 * std::max(1.0, out.upper);
  out.rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] > tol) ++out.rank;
  return out;
}

std::vector<DensityRow> density_report(const PointFamily& fam, const Measure& m,
                                       const std::vector<Region>& regions) {
  for (const auto& r : regions) {
    if (!m.contains(r.center))
      throw std::invalid_argument("density_report: region must lie inside the open domain");
    if (r.metric == MetricKind::Euclidean && boundary_distance(m, r.center) < r.radius - 1e-12)
      throw std::invalid_argument("density_report: region must lie inside the open domain");
  }
  std::vector<DensityRow> rows;
  for (const auto& lvl : fam.levels) {
    for (const auto& r : regions) {
      DensityRow row;
      row.k = lvl.k;
      row.region = r;
      row.dim = static_cast<int>(binomial(m.dim() + lvl.k, m.dim()));
      for (const auto& p : lvl.points) {
        bool inside;
        if (r.metric == MetricKind::Euclidean) {
          double d2 = 0.0;
          for (int t = 0; t < m.dim(); ++t) d2 += (p[t] - r.center[t]) * (p[t] - r.center[t]);
          inside = d2 < r.radius * r.radius;
        } else {
          inside = quasi_distance(m, r.center, p) < r.radius;
        }
        if (inside) ++row.count;
      }
      row.count_over_dim = static_cast<double>(row.count) / row.dim;
      row.eq_mass = equilibrium_mass(m, r);
      row.ratio = row.eq_mass > 0.0 ? row.count_over_dim / row.eq_mass : 0.0;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Dual basis
// ---------------------------------------------------------------------------

DualBasis::DualBasis(const std::vector<Point>& points, const PolySpace& ps)
    : ps_(ps), points_(points) {
  Eigen::MatrixXd gram = gram_matrix(points, ps);
  auto [lo, hi] = riesz_bounds(gram);
  (void)hi;
  if (lo <= 1e-10) throw std::invalid_argument("DualBasis: Gram singular - dual basis undefined");
  normalized_ = ps.basis_matrix(points);  // dim x m
  inv_sqrt_beta_.resize(normalized_.cols());
  for (Eigen::Index i = 0; i < normalized_.cols(); ++i) {
    inv_sqrt_beta_[i] = 1.0 / normalized_.col(i).norm();
    normalized_.col(i) *= inv_sqrt_beta_[i];
  }
  gram_inv_ = gram.llt().solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
}

Eigen::VectorXd DualBasis::kappa_at(std::span<const double> x) const {
  return normalized_.transpose() * ps_.basis_at(x);
}

double DualBasis::g(std::size_t i, std::span<const double> x) const {
  return gram_inv_.row(static_cast<Eigen::Index>(i)).dot(kappa_at(x));
}

double DualBasis::subspace_kernel(std::span<const double> x, std::span<const double> y) const {
  return kappa_at(x).dot(gram_inv_ * kappa_at(y));
}

double DualBasis::subspace_diag(std::span<const double> x) const {
  Eigen::VectorXd kx = kappa_at(x);
  return kx.dot(gram_inv_ * kx);
}

}  // namespace mzkit
