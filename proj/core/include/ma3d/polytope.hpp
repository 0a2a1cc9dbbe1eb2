#pragma once

// Volume and facet measures of the origin-symmetric polytope
//   K = { g in R^3 : 2 <g, e> <= b_e  for all +-e in V }.
//
// Derivative convention: the facet pair F_e, F_-e sits at distance
// b_e / (2 |e|) from the origin, so
//   d volume / d b_e = facet_area[e] / (2 |e|),
// where facet_area[e] is the combined measure of F_e and F_-e. The unit
// tests check this constant against finite differences.

#include <iosfwd>
#include <span>
#include <vector>

#include "ma3d/convex_polytope.hpp"
#include "ma3d/stencil.hpp"

namespace ma3d {

/// One offset per sign-identified stencil direction. Non-owning view of
/// the stencil; the offsets are copied.
class OffsetFamily {
 public:
  OffsetFamily(const Stencil& stencil, std::span<const double> offsets);

  const Stencil& stencil() const { return *stencil_; }
  std::span<const double> offsets() const { return offsets_; }

 private:
  const Stencil* stencil_;
  std::vector<double> offsets_;
};

struct PolytopeMeasure {
  double volume = 0.0;
  /// Combined (d-1)-measure of F_e and F_-e, per stencil direction.
  std::vector<double> facet_area;
  bool nondegenerate = false;
};

PolytopeMeasure measure_polytope(const OffsetFamily& fam);

/// Same as measure_polytope but without materialising the OffsetFamily.
PolytopeMeasure measure_polytope(const Stencil& stencil, std::span<const double> offsets);

/// Explicit polytope, e.g. for OFF dumps. Empty when some b_e <= 0.
ConvexPolytope build_symmetric_polytope(const Stencil& stencil, std::span<const double> offsets);

/// Volume of { g : 2 <g, e> <= <e, M e> for e in V }; M need not be
/// positive.
double measure_D_of_matrix(const SymMatrix& m, const Stencil& stencil);

/// Volume of { g : <g, e> <= c_e for every signed direction }, with
/// offsets_plus[k] for +e_k and offsets_minus[k] for -e_k.
double measure_asymmetric_polytope(const Stencil& stencil, std::span<const double> offsets_plus,
                                   std::span<const double> offsets_minus);

/// Bounding box of the parallelepiped lo_k <= <g, n_k> <= hi_k for three
/// independent normals. Returns false if the normals are degenerate.
bool slab_bounding_box(const Eigen::Matrix3d& normals_as_rows, const Eigen::Vector3d& lo,
                       const Eigen::Vector3d& hi, Eigen::Vector3d& box_lo, Eigen::Vector3d& box_hi);

}  // namespace ma3d
