#include "ma3d/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Geometry>

#include "ma3d/polytope.hpp"

namespace ma3d {

namespace {

void require_spd3(const SymMatrix& m) {
  if (m.dim() != 3) throw std::invalid_argument("Voronoi cells are implemented for d == 3");
  if (!m.is_positive_definite()) throw std::invalid_argument("Voronoi cell requires a positive definite matrix");
}

}  // namespace

std::vector<LatticeVector> voronoi_candidates(const SymMatrix& m) {
  require_spd3(m);
  const int d = m.dim();
  const double bound = m.kappa() * std::sqrt(static_cast<double>(d));
  const int r = static_cast<int>(std::ceil(bound)) + 1;
  const double bound2 = bound * bound * (1.0 + 1e-9) + 1e-9;
  std::vector<LatticeVector> out;
  for (int x = -r; x <= r; ++x) {
    for (int y = -r; y <= r; ++y) {
      for (int z = -r; z <= r; ++z) {
        const std::array<int, 3> c{x, y, z};
        const double n2 = static_cast<double>(x * x + y * y + z * z);
        if (n2 == 0.0 || n2 > bound2 || !is_coprime(c)) continue;
        LatticeVector e{std::span<const int>(c)};
        if (e.is_canonical()) out.push_back(e);
      }
    }
  }
  std::sort(out.begin(), out.end(), [&m](const LatticeVector& a, const LatticeVector& b) {
    const double qa = m.quad(a);
    const double qb = m.quad(b);
    return qa != qb ? qa < qb : b < a;
  });
  return out;
}

VoronoiCell voronoi_cell(const SymMatrix& m) {
  const auto candidates = voronoi_candidates(m);
  const Eigen::Matrix3d md = m.dense3();

  // The three shortest candidates are not always independent; take the
  // first spanning triple for the bounding box.
  std::array<std::size_t, 3> tri{};
  {
    std::size_t found = 0;
    for (std::size_t k = 0; k < candidates.size() && found < 3; ++k) {
      const Eigen::Vector3d v = candidates[k].to_vector3d();
      bool independent = true;
      if (found == 1) {
        independent = v.cross(candidates[tri[0]].to_vector3d()).squaredNorm() > 0.0;
      } else if (found == 2) {
        const Eigen::Vector3d n = candidates[tri[0]].to_vector3d().cross(candidates[tri[1]].to_vector3d());
        independent = std::abs(n.dot(v)) >= 0.5;
      }
      if (independent) tri[found++] = k;
    }
  }
  Eigen::Matrix3d normals;
  Eigen::Vector3d hi;
  for (int k = 0; k < 3; ++k) {
    normals.row(k) = (md * candidates[tri[k]].to_vector3d()).transpose();
    hi(k) = 0.5 * m.quad(candidates[tri[k]]);
  }
  Eigen::Vector3d box_lo;
  Eigen::Vector3d box_hi;
  if (!slab_bounding_box(normals, -hi, hi, box_lo, box_hi)) {
    throw std::logic_error("degenerate Voronoi bounding slabs");
  }

  ConvexPolytope poly = ConvexPolytope::box(box_lo, box_hi);
  auto cut = [&](std::size_t k) {
    const Eigen::Vector3d n = md * candidates[k].to_vector3d();
    const double half = 0.5 * m.quad(candidates[k]);
    const int tag = static_cast<int>(k);
    poly.clip({n, half, tag});
    poly.clip({-n, half, tag});
  };
  for (std::size_t k : tri) cut(k);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (k != tri[0] && k != tri[1] && k != tri[2]) cut(k);
  }

  VoronoiCell cell;
  const auto areas = poly.facet_areas(static_cast<int>(candidates.size()));
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (areas[k] > kStrictFacetArea) {
      cell.strict_vectors.push_back(candidates[k]);
      cell.facet_areas.push_back(areas[k]);
    }
  }
  cell.volume = poly.volume();
  cell.polytope = std::move(poly);
  return cell;
}

std::vector<LatticeVector> strict_voronoi_vectors(const SymMatrix& m) {
  return voronoi_cell(m).strict_vectors;
}

bool is_consistent(const SymMatrix& m, const Stencil& stencil) {
  if (m.dim() != stencil.dim()) throw std::invalid_argument("matrix and stencil dimensions differ");
  const auto strict = strict_voronoi_vectors(m);
  return std::all_of(strict.begin(), strict.end(), [&](const LatticeVector& e) { return stencil.contains(e); });
}

}  // namespace ma3d
