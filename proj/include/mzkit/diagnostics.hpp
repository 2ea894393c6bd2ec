#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mzkit/geometry.hpp"
#include "mzkit/polyspace.hpp"

namespace mzkit {

/// A sequence of finite point sets, one per degree, degrees strictly
/// increasing. Each point must lie inside the closed domain.
struct PointFamily {
  struct Level {
    int k = 0;
    std::vector<Point> points;
  };
  int n = 1;
  std::vector<Level> levels;

  const Level* level(int k) const;
  void validate(const Measure& m) const;
};

struct DiscreteMeasure {
  struct Atom {
    Point x;
    double mass = 0.0;
  };
  std::vector<Atom> atoms;

  double total() const {
    double t = 0.0;
    for (const auto& a : atoms) t += a.mass;
    return t;
  }
};

/// mu_k: the Christoffel-weighted counting measure sum_lambda delta_lambda
/// / beta_k(lambda) of one family level.
DiscreteMeasure christoffel_weighted(const std::vector<Point>& points, const PolySpace& ps);

/// min over distinct pairs of k * rho(lambda, lambda'); +inf for fewer than
/// two points, 0 for a duplicated point. Uses the box-proxy quasi-metric on
/// box domains and the pullback metric on ellipsoids.
double separation_constant(const PointFamily& fam, int k, const Measure& m);

enum class CarlesonReference { Lebesgue, Weighted };

struct CarlesonResult {
  double sup_ratio = 0.0;
  Point witness;
  std::size_t net_size = 0;
  double net_spacing = 0.0;
};

/// sup over a deterministic greedy 1/(2k)-net of
/// mu(B(x, 1/k)) / V(B(x, 1/k)) with the proxy volumes; returns the witness
/// center. Throws CapError("net too large") past net_cap.
CarlesonResult carleson_ratio(const DiscreteMeasure& mu, int k, const Measure& m,
                              CarlesonReference ref = CarlesonReference::Lebesgue,
                              std::size_t net_cap = 2'000'000);

/// Gram of the normalized reproducing kernels at the points: unit diagonal,
/// G_ij = K(p_i, p_j)/sqrt(beta_i beta_j).
Eigen::MatrixXd gram_matrix(const std::vector<Point>& points, const PolySpace& ps);

/// Extreme eigenvalues of the normalized-kernel Gram.
std::pair<double, double> riesz_bounds(const Eigen::MatrixXd& gram);

struct FrameBoundsResult {
  double lower = 0.0;  // smallest eigenvalue of the frame operator
  double upper = 0.0;
  int rank = 0;
};

/// Frame operator S = sum_lambda kappa_lambda (x) kappa_lambda in the ONB
/// (dim x dim); lower > 0 iff the normalized kernels span P_k.
FrameBoundsResult frame_bounds(const std::vector<Point>& points, const PolySpace& ps);

struct DensityRow {
  int k = 0;
  Region region;
  long count = 0;
  int dim = 0;
  double count_over_dim = 0.0;
  double eq_mass = 0.0;
  double ratio = 0.0;  // count_over_dim / eq_mass
};

std::vector<DensityRow> density_report(const PointFamily& fam, const Measure& m,
                                       const std::vector<Region>& regions);

/// Dual (biorthogonal) system g_lambda of the normalized kernels in their
/// span, and the reproducing kernel of that span. Requires a nonsingular
/// Gram (eigmin > 1e-10).
class DualBasis {
 public:
  DualBasis(const std::vector<Point>& points, const PolySpace& ps);

  double g(std::size_t i, std::span<const double> x) const;
  /// Reproducing kernel of span{kappa_lambda}.
  double subspace_kernel(std::span<const double> x, std::span<const double> y) const;
  double subspace_diag(std::span<const double> x) const;

 private:
  Eigen::VectorXd kappa_at(std::span<const double> x) const;

  const PolySpace& ps_;
  std::vector<Point> points_;
  Eigen::MatrixXd normalized_;  // dim x m, columns are kappa coefficient vectors
  Eigen::VectorXd inv_sqrt_beta_;
  Eigen::MatrixXd gram_inv_;
};

}  // namespace mzkit
