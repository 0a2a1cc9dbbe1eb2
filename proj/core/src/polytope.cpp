#include "ma3d/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Geometry>
#include <Eigen/LU>

namespace ma3d {

namespace {

void require_3d(const Stencil& stencil) {
  if (stencil.dim() != 3) throw std::invalid_argument("polytope measures are implemented for d == 3");
}

void require_finite(std::span<const double> offsets) {
  for (double b : offsets) {
    if (!std::isfinite(b)) throw std::invalid_argument("polytope offsets must be finite");
  }
}

// Three linearly independent stencil directions.
std::array<std::size_t, 3> spanning_triple(const Stencil& stencil) {
  const auto& dirs = stencil.real_directions();
  const std::size_t m = dirs.size();
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const Eigen::Vector3d ab = dirs[a].cross(dirs[b]);
      if (ab.squaredNorm() == 0.0) continue;
      for (std::size_t c = b + 1; c < m; ++c) {
        if (std::abs(ab.dot(dirs[c])) >= 0.5) return {a, b, c};
      }
    }
  }
  throw std::logic_error("stencil does not span R^3");
}

}  // namespace

bool slab_bounding_box(const Eigen::Matrix3d& normals_as_rows, const Eigen::Vector3d& lo,
                       const Eigen::Vector3d& hi, Eigen::Vector3d& box_lo, Eigen::Vector3d& box_hi) {
  Eigen::FullPivLU<Eigen::Matrix3d> lu(normals_as_rows);
  if (!lu.isInvertible()) return false;
  const Eigen::Matrix3d inv = lu.inverse();
  for (int j = 0; j < 3; ++j) {
    double mn = 0.0;
    double mx = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double a = inv(j, k) * lo(k);
      const double b = inv(j, k) * hi(k);
      mn += std::min(a, b);
      mx += std::max(a, b);
    }
    const double pad = 0.05 * (mx - mn) + 1e-300;
    box_lo(j) = mn - pad;
    box_hi(j) = mx + pad;
  }
  return true;
}

OffsetFamily::OffsetFamily(const Stencil& stencil, std::span<const double> offsets)
    : stencil_(&stencil), offsets_(offsets.begin(), offsets.end()) {
  if (offsets_.size() != stencil.size()) {
    throw std::invalid_argument("offset family needs one offset per stencil direction");
  }
  require_finite(offsets_);
}

ConvexPolytope build_symmetric_polytope(const Stencil& stencil, std::span<const double> offsets) {
  require_3d(stencil);
  if (offsets.size() != stencil.size()) {
    throw std::invalid_argument("offset family needs one offset per stencil direction");
  }
  require_finite(offsets);
  if (std::any_of(offsets.begin(), offsets.end(), [](double b) { return b <= 0.0; })) {
    return {};
  }
  const auto& dirs = stencil.real_directions();
  const auto tri = spanning_triple(stencil);
  Eigen::Matrix3d n;
  Eigen::Vector3d hi;
  for (int k = 0; k < 3; ++k) {
    n.row(k) = dirs[tri[k]].transpose();
    hi(k) = 0.5 * offsets[tri[k]];
  }
  Eigen::Vector3d box_lo;
  Eigen::Vector3d box_hi;
  slab_bounding_box(n, -hi, hi, box_lo, box_hi);

  ConvexPolytope poly = ConvexPolytope::box(box_lo, box_hi);
  // The spanning triple first: it cuts away the whole bounding box.
  auto cut = [&](std::size_t k) {
    const double half = 0.5 * offsets[k];
    const int tag = static_cast<int>(k);
    poly.clip({dirs[k], half, tag});
    poly.clip({-dirs[k], half, tag});
  };
  for (std::size_t k : tri) cut(k);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    if (k != tri[0] && k != tri[1] && k != tri[2]) cut(k);
  }
  return poly;
}

PolytopeMeasure measure_polytope(const Stencil& stencil, std::span<const double> offsets) {
  PolytopeMeasure out;
  out.facet_area.assign(stencil.size(), 0.0);
  const ConvexPolytope poly = build_symmetric_polytope(stencil, offsets);
  if (poly.empty()) return out;
  out.volume = poly.volume();
  out.facet_area = poly.facet_areas(static_cast<int>(stencil.size()));
  out.nondegenerate = out.volume > 0.0;
  return out;
}

PolytopeMeasure measure_polytope(const OffsetFamily& fam) {
  return measure_polytope(fam.stencil(), fam.offsets());
}

double measure_D_of_matrix(const SymMatrix& m, const Stencil& stencil) {
  if (m.dim() != stencil.dim()) throw std::invalid_argument("matrix and stencil dimensions differ");
  std::vector<double> b(stencil.size());
  for (std::size_t k = 0; k < stencil.size(); ++k) b[k] = m.quad(stencil[k]);
  return measure_polytope(stencil, b).volume;
}

double measure_asymmetric_polytope(const Stencil& stencil, std::span<const double> offsets_plus,
                                   std::span<const double> offsets_minus) {
  require_3d(stencil);
  if (offsets_plus.size() != stencil.size() || offsets_minus.size() != stencil.size()) {
    throw std::invalid_argument("asymmetric polytope needs two offsets per stencil direction");
  }
  require_finite(offsets_plus);
  require_finite(offsets_minus);
  // -c_-e <= <g, e> <= c_e: an empty slab means an empty polytope.
  for (std::size_t k = 0; k < stencil.size(); ++k) {
    if (offsets_plus[k] + offsets_minus[k] <= 0.0) return 0.0;
  }
  const auto& dirs = stencil.real_directions();
  const auto tri = spanning_triple(stencil);
  Eigen::Matrix3d n;
  Eigen::Vector3d lo;
  Eigen::Vector3d hi;
  for (int k = 0; k < 3; ++k) {
    n.row(k) = dirs[tri[k]].transpose();
    lo(k) = -offsets_minus[tri[k]];
    hi(k) = offsets_plus[tri[k]];
  }
  Eigen::Vector3d box_lo;
  Eigen::Vector3d box_hi;
  slab_bounding_box(n, lo, hi, box_lo, box_hi);
  ConvexPolytope poly = ConvexPolytope::box(box_lo, box_hi);
  auto cut = [&](std::size_t k) {
    const int tag = static_cast<int>(k);
    return poly.clip({dirs[k], offsets_plus[k], tag}) && poly.clip({-dirs[k], offsets_minus[k], tag});
  };
  for (std::size_t k : tri) {
    if (!cut(k)) return 0.0;
  }
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    if (k != tri[0] && k != tri[1] && k != tri[2] && !cut(k)) return 0.0;
  }
  return poly.volume();
}

}  // namespace ma3d
