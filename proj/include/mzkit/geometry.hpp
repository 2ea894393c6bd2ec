#pragma once

#include <cstdint>
#include <span>

#include "mzkit/measure.hpp"

namespace mzkit {

/// Anisotropic distance on the unit ball:
///   rho(x, y) = arccos(<x,y> + sqrt(1-|x|^2) sqrt(1-|y|^2)),
/// the geodesic distance of the lifts (x, sqrt(1-|x|^2)) on the sphere.
/// Ranges in [0, pi]; the argument is clamped so roundoff never escapes
/// the arccos domain.
double rho(std::span<const double> x, std::span<const double> y);

/// Box-proxy quasi-metric: the max over axes of the 1-d rho distance on
/// each side interval (affinely mapped to [-1,1]). Metric balls are boxes
/// of size ~eps along faraway axes and ~eps^2 + eps*sqrt(margin) along
/// axes close to their face, mirroring the ball geometry.
double rho_box(std::span<const double> x, std::span<const double> y, const Measure& box);

/// Dispatch on the measure kind: ball metric, box proxy, or the ball
/// metric after pulling an ellipsoid back by its semiaxes.
double quasi_distance(const Measure& m, std::span<const double> x, std::span<const double> y);

enum class MetricKind { RhoBall, Euclidean, BoxProxy };

struct MetricBall {
  Point center;
  double radius = 0.0;  // <= pi for the rho metrics
  MetricKind metric = MetricKind::RhoBall;
};

struct BallVolumeProxy {
  double lebesgue = 0.0;  // eps^n (s + eps),      s = sqrt(boundary scale)
  double weighted = 0.0;  // eps^n (s + eps)^(2a)
};

/// Standing proxy formulas for the volume of the metric ball B(x, eps).
/// For the ball measure s = sqrt(1-|x|^2); for box/ellipsoid s =
/// sqrt(d(x, boundary)), which keeps the same comparability class.
BallVolumeProxy metric_ball_volume(const Measure& m, std::span<const double> x, double eps);

struct McVolume {
  double lebesgue = 0.0;
  double weighted = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Seeded Monte-Carlo estimate of the exact metric-ball volume, for
/// validating the proxy comparability constants.
McVolume metric_ball_volume_mc(const Measure& m, std::span<const double> x, double eps,
                               std::uint64_t seed, int samples);

/// Euclidean distance to the boundary. Ball and box are closed forms; the
/// ellipsoid solves the normal equation (safeguarded Newton, 1e-10).
double boundary_distance(const Measure& m, std::span<const double> x);

struct Region {
  Point center;
  double radius = 0.0;
  MetricKind metric = MetricKind::Euclidean;
};

/// Normalized equilibrium mass of a region, in [0, 1].
/// Ball domains use the exact density (1-|x|^2)^(-1/2): closed-form
/// arcsine law in 1-d, quadrature for n >= 2. Box/ellipsoid domains use
/// the comparability-grade density 1/sqrt(d(x, boundary)) normalized on a
/// fixed deterministic grid (masses on the shared grid are exactly
/// additive and monotone).
double equilibrium_mass(const Measure& m, const Region& region);

}  // namespace mzkit
