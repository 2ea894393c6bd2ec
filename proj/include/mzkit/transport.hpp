#pragma once

#include <cstddef>

#include "mzkit/diagnostics.hpp"

namespace mzkit {

/// Exact Vaserstein-1 distance between discrete measures of equal total
/// mass (within 1e-10; otherwise "mass mismatch"). 1-d instances go through
/// the monotone-coupling CDF formula; higher dimensions solve the discrete
/// transport LP exactly with a transportation simplex under Euclidean cost.
/// Throws CapError("LP size cap exceeded") past `atom_cap` total atoms.
double vaserstein1(const DiscreteMeasure& sigma, const DiscreteMeasure& nu,
                   std::size_t atom_cap = 4000);

struct TransportGap {
  double w1 = 0.0;
  double mesh = 0.0;        // discretization mesh of the nu_k grid
  double sigma_mass = 0.0;  // both masses equal #Lambda_k / dim P_k
  double nu_mass = 0.0;
};

/// W1 between sigma_k = (1/dim) sum_lambda delta_lambda and the
/// discretization of nu_k = (1/dim) Kcal_k(x,x) dmu on the quadrature grid
/// of the given order, where Kcal_k is the reproducing kernel of
/// span{kappa_lambda}; requires a nonsingular Gram at this level.
TransportGap interpolation_transport_gap(const std::vector<Point>& points, const PolySpace& ps,
                                         int quad_order);

/// (1/dim) int int |x-y|^2 K_k(x,y)^2 dmu dmu via tensor quadrature; exact
/// for quad_order >= 2k+2.
double offdiag_second_moment(const PolySpace& ps, int quad_order);

}  // namespace mzkit
