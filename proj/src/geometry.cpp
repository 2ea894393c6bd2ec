#include "mzkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mzkit/rng.hpp"

namespace mzkit {

namespace {

double clamp01(double v) { return std::max(0.0, std::min(1.0, v)); }

double lift_angle(double u) {
  // u in [-1,1] up to roundoff; angle of the lift (u, sqrt(1-u^2))
  return std::acos(std::max(-1.0, std::min(1.0, u)));
}

}  // namespace

double rho(std::span<const double> x, std::span<const double> y) {
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  double c = dot + std::sqrt(clamp01(1.0 - nx)) * std::sqrt(clamp01(1.0 - ny));
  return std::acos(std::max(-1.0, std::min(1.0, c)));
}

double rho_box(std::span<const double> x, std::span<const double> y, const Measure& box) {
  if (box.kind() != MeasureKind::Box) throw std::invalid_argument("rho_box: measure is not a box");
  double worst = 0.0;
  for (int t = 0; t < box.dim(); ++t) {
    double lo = box.bounds()[t][0], hi = box.bounds()[t][1];
    double ux = (2.0 * x[t] - lo - hi) / (hi - lo);
    double uy = (2.0 * y[t] - lo - hi) / (hi - lo);
    worst = std::max(worst, std::abs(lift_angle(ux) - lift_angle(uy)));
  }
  return worst;
}

double quasi_distance(const Measure& m, std::span<const double> x, std::span<const double> y) {
  switch (m.kind()) {
    case MeasureKind::Ball:
      return rho(x, y);
    case MeasureKind::Box:
      return rho_box(x, y, m);
    case MeasureKind::Ellipsoid: {
      Point px(m.dim()), py(m.dim());
      for (int t = 0; t < m.dim(); ++t) {
        px[t] = x[t] / m.semiaxes()[t];
        py[t] = y[t] / m.semiaxes()[t];
      }
      return rho(px, py);
    }
  }
  return 0.0;
}

BallVolumeProxy metric_ball_volume(const Measure& m, std::span<const double> x, double eps) {
  if (!(eps > 0.0) || eps > M_PI)
    throw std::invalid_argument("metric_ball_volume: eps must lie in (0, pi]");
  double s;
  if (m.kind() == MeasureKind::Ball) {
    double nx = 0.0;
    for (double v : x) nx += v * v;
    s = std::sqrt(clamp01(1.0 - nx));
  } else {
    s = std::sqrt(std::max(0.0, boundary_distance(m, x)));
  }
  BallVolumeProxy out;
  double en = std::pow(eps, m.dim());
  out.lebesgue = en * (s + eps);
  out.weighted = en * std::pow(s + eps, 2.0 * m.effective_exponent());
  return out;
}

McVolume metric_ball_volume_mc(const Measure& m, std::span<const double> x, double eps,
                               std::uint64_t seed, int samples) {
  if (samples < 1) throw std::invalid_argument("metric_ball_volume_mc: samples must be >= 1");
  const int n = m.dim();
  // bounding box of the domain
  std::vector<std::array<double, 2>> bb(n);
  double vol_bb = 1.0;
  for (int t = 0; t < n; ++t) {
    switch (m.kind()) {
      case MeasureKind::Ball:
        bb[t] = {-1.0, 1.0};
        break;
      case MeasureKind::Box:
        bb[t] = m.bounds()[t];
        break;
      case MeasureKind::Ellipsoid:
        bb[t] = {-m.semiaxes()[t], m.semiaxes()[t]};
        break;
    }
    vol_bb *= bb[t][1] - bb[t][0];
  }
  Rng rng(seed);
  double hits = 0.0, whits = 0.0;
  Point y(n);
  const double a = m.exponent();
  for (int i = 0; i < samples; ++i) {
    for (int t = 0; t < n; ++t) y[t] = rng.uniform(bb[t][0], bb[t][1]);
    if (!m.contains(y)) continue;
    if (quasi_distance(m, x, y) >= eps) continue;
    hits += 1.0;
    if (m.kind() == MeasureKind::Ball) {
      double ny = 0.0;
      for (double v : y) ny += v * v;
      whits += std::pow(clamp01(1.0 - ny), a - 0.5);
    } else {
      whits += 1.0;
    }
  }
  McVolume out;
  out.lebesgue = vol_bb * hits / samples;
  out.weighted = vol_bb * whits / samples;
  out.samples = samples;
  out.seed = seed;
  return out;
}

namespace {

double ellipsoid_interior_distance(const std::vector<double>& s, std::span<const double> x);

}  // namespace

double boundary_distance(const Measure& m, std::span<const double> x) {
  switch (m.kind()) {
    case MeasureKind::Ball: {
      double nx = 0.0;
      for (double v : x) nx += v * v;
      return std::max(0.0, 1.0 - std::sqrt(nx));
    }
    case MeasureKind::Box: {
      double best = std::numeric_limits<double>::infinity();
      for (int t = 0; t < m.dim(); ++t)
        best = std::min({best, x[t] - m.bounds()[t][0], m.bounds()[t][1] - x[t]});
      return std::max(0.0, best);
    }
    case MeasureKind::Ellipsoid:
      return ellipsoid_interior_distance(m.semiaxes(), x);
  }
  return 0.0;
}

namespace {

// Distance from an interior point to the ellipsoid sum (x_i/s_i)^2 = 1.
// Closest-point multiplier form: y_i = s_i^2 x_i / (s_i^2 + t) with t the
// largest root of F(t) = sum (s_i x_i / (s_i^2 + t))^2 - 1 in (-smin^2, 0].
// F is strictly decreasing there, so a safeguarded Newton converges; when
// the min-axis component vanishes the root may not exist and the closest
// point sits at t = -smin^2 with mass on the min axis (handled directly).
double ellipsoid_interior_distance(const std::vector<double>& s, std::span<const double> x) {
  const int n = static_cast<int>(s.size());
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double t = x[i] / s[i];
    r2 += t * t;
  }
  if (r2 >= 1.0) return 0.0;
  double smin = *std::min_element(s.begin(), s.end());
  const double smin2 = smin * smin;

  auto F = [&](double t) {
    double v = -1.0;
    for (int i = 0; i < n; ++i) {
      double q = s[i] * x[i] / (s[i] * s[i] + t);
      v += q * q;
    }
    return v;
  };
  auto dF = [&](double t) {
    double v = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = s[i] * s[i] + t;
      v -= 2.0 * s[i] * s[i] * x[i] * x[i] / (d * d * d);
    }
    return v;
  };

  // bracket: find t_lo > -smin^2 with F(t_lo) > 0, if it exists
  double t_hi = 0.0;
  double t_lo = -smin2 * (1.0 - 1e-15);
  bool bracketed = false;
  for (int pass = 0; pass < 60 && !bracketed; ++pass) {
    if (F(t_lo) > 0.0)
      bracketed = true;
    else
      t_lo = -smin2 + (t_lo + smin2) * 0.5;  // move toward -smin^2
    if (t_lo <= -smin2 * (1.0 - 1e-15) && !bracketed) break;
  }
  if (!bracketed && F(-smin2 * (1.0 - 1e-15)) <= 0.0) {
    // degenerate case: closest point carries weight on the min axis
    double acc = 0.0, dist2 = 0.0;
    for (int i = 0; i < n; ++i) {
      if (s[i] * s[i] - smin2 <= 1e-15 * smin2) continue;
      double yi = s[i] * s[i] * x[i] / (s[i] * s[i] - smin2);
      acc += yi * yi / (s[i] * s[i]);
      dist2 += (x[i] - yi) * (x[i] - yi);
    }
    double rem = std::max(0.0, 1.0 - acc);
    dist2 += smin2 * rem;  // |x_min-axis - y_min-axis|^2 = smin^2 * rem (x is 0 there)
    return std::sqrt(dist2);
  }

  // safeguarded Newton on F
  double t = 0.5 * (t_lo + t_hi);
  for (int it = 0; it < 200; ++it) {
    double f = F(t);
    if (f > 0.0)
      t_lo = t;
    else
      t_hi = t;
    double d = dF(t);
    double step = (d != 0.0) ? t - f / d : 0.5 * (t_lo + t_hi);
    if (!(step > t_lo && step < t_hi)) step = 0.5 * (t_lo + t_hi);
    if (std::abs(step - t) < 1e-10 * smin2 + 1e-300) {
      t = step;
      break;
    }
    t = step;
  }
  double dist2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double yi = s[i] * s[i] * x[i] / (s[i] * s[i] + t);
    dist2 += (x[i] - yi) * (x[i] - yi);
  }
  return std::sqrt(dist2);
}

// fixed deterministic grid for the proxy equilibrium density on box and
// ellipsoid domains; shared across calls so that region masses are exactly
// additive and monotone
struct ProxyGrid {
  std::vector<Point> pts;
  std::vector<double> mass;  // w * density, unnormalized
  double total = 0.0;
};

ProxyGrid proxy_grid(const Measure& m) {
  int per_axis;
  switch (m.dim()) {
    case 1: per_axis = 400; break;
    case 2: per_axis = 120; break;
    case 3: per_axis = 40; break;
    default: per_axis = 16; break;
  }
  QuadratureRule rule = m.quadrature(2 * per_axis - 1);
  ProxyGrid g;
  g.pts.reserve(rule.points.rows());
  g.mass.reserve(rule.points.rows());
  for (Eigen::Index i = 0; i < rule.points.rows(); ++i) {
    Point p(m.dim());
    for (int t = 0; t < m.dim(); ++t) p[t] = rule.points(i, t);
    double d = boundary_distance(m, p);
    double dens = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
    g.total += rule.weights[i] * dens;
    g.mass.push_back(rule.weights[i] * dens);
    g.pts.push_back(std::move(p));
  }
  return g;
}

bool region_contains(const Measure& m, const Region& r, std::span<const double> y) {
  if (r.metric == MetricKind::Euclidean) {
    double d2 = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) d2 += (y[t] - r.center[t]) * (y[t] - r.center[t]);
    return d2 < r.radius * r.radius;
  }
  return quasi_distance(m, r.center, y) < r.radius;
}

double ball_equilibrium_mass(const Measure& m, const Region& r) {
  const int n = m.dim();
  if (n == 1) {
    // arcsine law: mass of {sin(phi) : phi in I} is |I| / pi
    double phic = std::asin(std::max(-1.0, std::min(1.0, r.center[0])));
    double lo, hi;
    if (r.metric == MetricKind::Euclidean) {
      lo = std::asin(std::max(-1.0, r.center[0] - r.radius));
      hi = std::asin(std::min(1.0, r.center[0] + r.radius));
    } else {
      lo = std::max(phic - r.radius, -0.5 * M_PI);
      hi = std::min(phic + r.radius, 0.5 * M_PI);
    }
    return std::max(0.0, hi - lo) / M_PI;
  }
  const double total = Measure::ball(n, 0.0).mass();
  if (r.metric == MetricKind::Euclidean) {
    double cnorm = 0.0;
    for (double v : r.center) cnorm += v * v;
    cnorm = std::sqrt(cnorm);
    if (r.radius >= 1.0 - 1e-12 && cnorm <= 1e-14) return 1.0;  // the whole domain
    if (boundary_distance(m, r.center) >= r.radius) {
      // strictly interior: smooth integrand over the Euclidean subball
      double prev = 0.0;
      for (int order = 24; order <= 96; order += 24) {
        QuadratureRule sub = Measure::ball(n, 0.5).quadrature(order);
        double acc = 0.0;
        for (Eigen::Index i = 0; i < sub.points.rows(); ++i) {
          double ny = 0.0;
          for (int t = 0; t < n; ++t) {
            double y = r.center[t] + r.radius * sub.points(i, t);
            ny += y * y;
          }
          acc += sub.weights[i] / std::sqrt(std::max(1e-300, 1.0 - ny));
        }
        acc *= std::pow(r.radius, n);
        if (order > 24 && std::abs(acc - prev) < 1e-11 * total) {
          prev = acc;
          break;
        }
        prev = acc;
      }
      return std::min(1.0, prev / total);
    }
  }
  // generic: indicator against the weighted rule (the Jacobi weight absorbs
  // the boundary singularity); comparability grade
  QuadratureRule rule = Measure::ball(n, 0.0).quadrature(240);
  double acc = 0.0;
  Point y(n);
  for (Eigen::Index i = 0; i < rule.points.rows(); ++i) {
    for (int t = 0; t < n; ++t) y[t] = rule.points(i, t);
    if (region_contains(m, r, y)) acc += rule.weights[i];
  }
  return acc / total;
}

}  // namespace

double equilibrium_mass(const Measure& m, const Region& region) {
  if (static_cast<int>(region.center.size()) != m.dim())
    throw std::invalid_argument("equilibrium_mass: region dimension mismatch");
  if (!m.contains(region.center)) throw std::invalid_argument("equilibrium_mass: region outside domain");
  if (region.metric == MetricKind::Euclidean &&
      boundary_distance(m, region.center) + 1e-9 < region.radius)
    throw std::invalid_argument("equilibrium_mass: region outside domain");
  if (!(region.radius > 0.0)) return 0.0;

  if (m.kind() == MeasureKind::Ball) return ball_equilibrium_mass(m, region);

  // the grid construction is deterministic, so masses computed in separate
  // calls still share the same nodes (additivity holds across calls)
  ProxyGrid grid = proxy_grid(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.pts.size(); ++i)
    if (region_contains(m, region, grid.pts[i])) acc += grid.mass[i];
  return acc / grid.total;
}

}  // namespace mzkit
