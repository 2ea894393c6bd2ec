#pragma once

#include <cstdint>
#include <vector>

#include "mzkit/diagnostics.hpp"

namespace mzkit {

enum class FamilyKind { Gauss1d, TensorGauss, RandomSeparated, EquilibriumRandom };

struct GeneratorParams {
  std::vector<int> ks;   // degrees, strictly increasing
  double a = 0.5;        // weight exponent (gauss kinds)
  double eps = 1.0;      // target separation: min k*rho >= eps (random_separated)
  int count = 0;         // target point count per level (random kinds)
};

struct GeneratedFamily {
  PointFamily family;
  /// per-level flag: random_separated stopped at saturation before
  /// reaching the target count
  std::vector<bool> saturated;
};

/// Candidate families for the diagnostics, deterministic from the seed.
///  - gauss_1d:          zeros of the degree-(k+1) orthogonal polynomial
///  - tensor_gauss:      per-axis Gauss nodes, product thinned to the ball
///                       (sampling-side inputs; counts exceed dim P_k)
///  - random_separated:  dart throwing under rho with separation eps/k
///  - equilibrium_random: inverse-CDF radial sampling of the equilibrium
///                       measure with uniform directions
GeneratedFamily generate_family(FamilyKind kind, int n, const GeneratorParams& params,
                                std::uint64_t seed);

}  // namespace mzkit
