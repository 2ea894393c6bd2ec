#pragma once

#include <cstdint>
#include <vector>

#include "mzkit/polyspace.hpp"

namespace mzkit {

/// J_nu(t) / t^nu, continuous at 0 with value 1 / (2^nu Gamma(nu+1)).
/// Power series below the crossover, standard large-argument evaluation
/// above; supported range t in [0, 200], nu >= 1/2.
double jstar(double nu, double t);

/// Bessel function of the first kind (series / standard evaluation split
/// as in jstar).
double bessel_j(double nu, double t);

/// Positive zeros of J_nu up to tmax, bracketed by sign changes and
/// bisected to 1e-12.
std::vector<double> bessel_zeros(double nu, double tmax);

/// Bessel scaling profile for dimension n: order nu = n/2, the normalized
/// kernel J*_nu(t)/J*_nu(0), and the zero list.
struct BesselProfile {
  double nu = 0.5;
  std::vector<double> zeros;

  static BesselProfile make(int n, double tmax = 60.0);
  double normalized(double t) const { return jstar(nu, t) / jstar(nu, 0.0); }
};

struct ScalingErrorRow {
  int k = 0;
  double sup_error = 0.0;
};

/// sup over u, v in a grid of [-R, R]^n of
///   | K_k(u/k, v/k) / K_k(0,0)  -  J*_{n/2}(|u-v|) / J*_{n/2}(0) |.
/// grid_count points per axis; R/k_min should stay in the bulk.
std::vector<ScalingErrorRow> scaling_error(const Measure& ball_measure,
                                           const std::vector<int>& ks, double R,
                                           int grid_count);

struct ZeroDistancePair {
  std::size_t i = 0, j = 0;
  double distance = 0.0;
  double nearest_zero = 0.0;
  double offset = 0.0;  // |distance - nearest zero|
};

struct ZeroDistanceReport {
  bool compatible = false;  // all pairwise distances within tol of a zero
  double tol = 0.0;
  std::vector<ZeroDistancePair> pairs;
};

/// Checks whether all pairwise distances of X sit within tol of a zero of
/// J_nu (the orthogonality obstruction test).
ZeroDistanceReport bessel_zero_distance_test(const std::vector<Point>& X, double nu, double tol);

struct RestartStat {
  int restart = 0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
};

struct SearchResult {
  double best_residual = 0.0;
  std::vector<Point> configuration;
  int best_restart = 0;
  std::vector<RestartStat> restarts;
  std::uint64_t seed = 0;
};

/// Multi-start derivative-free minimization (Nelder-Mead, deterministic
/// from the seed) of the Gram off-diagonal mass
///   sum_{i != j} K(x_i, x_j)^2 / (beta(x_i) beta(x_j))
/// over m-point configurations in the closed ball. Evidence only: reports
/// the best residual found, never an existence verdict. An optional
/// initial configuration seeds restart 0.
SearchResult orthogonality_residual_search(const Measure& ball_measure, int k, int m,
                                           std::uint64_t seed, int restarts,
                                           const std::vector<Point>* init = nullptr,
                                           int max_iterations = 4000,
                                           Precision p = Precision::Extended);

}  // namespace mzkit
