#pragma once

// Voronoi cells of Z^3 under the metric |x|_M = sqrt(<x, M x>), strict
// Voronoi vectors, and the consistency predicate of the polytope-volume
// scheme (consistent iff the stencil holds every strict Voronoi vector).

#include <vector>

#include "ma3d/convex_polytope.hpp"
#include "ma3d/stencil.hpp"

namespace ma3d {

/// Facets with a combined area at or below this count as lower dimensional.
inline constexpr double kStrictFacetArea = 1e-10;

struct VoronoiCell {
  /// Canonical representatives, sorted by |e|_M.
  std::vector<LatticeVector> strict_vectors;
  /// Combined area of the facet pair Vor(M; +-e), same order.
  std::vector<double> facet_areas;
  double volume = 0.0;
  ConvexPolytope polytope;
};

/// Candidate Voronoi vectors: co-prime, canonical, |e| <= kappa(M) sqrt(d),
/// drawn from the box of radius ceil(kappa(M) sqrt(d)) + 1.
std::vector<LatticeVector> voronoi_candidates(const SymMatrix& m);

/// Vor(M) = { g : 2 <g, M e> <= |e|_M^2 for all e }, built from the
/// candidates. Throws std::invalid_argument unless M is positive definite
/// and d == 3.
VoronoiCell voronoi_cell(const SymMatrix& m);

std::vector<LatticeVector> strict_voronoi_vectors(const SymMatrix& m);

bool is_consistent(const SymMatrix& m, const Stencil& stencil);

}  // namespace ma3d
