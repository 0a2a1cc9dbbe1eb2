#pragma once

// Cartesian discretization of a convex domain. Points are stored in
// lattice units: the interior X is n*Omega intersected with Z^3, the
// boundary set dX collects the first boundary hits x + h e of the stencil
// rays. Physical coordinates are lattice coordinates divided by n.

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "ma3d/stencil.hpp"

namespace ma3d {

/// Open bounded convex domain: the unit cube ]0,1[^3 or a ball.
class Domain {
 public:
  enum class Kind { unit_cube, ball };

  static Domain unit_cube();
  static Domain ball(const Eigen::Vector3d& center, double radius);

  Kind kind() const { return kind_; }
  int dim() const { return 3; }
  const Eigen::Vector3d& center() const { return center_; }
  double radius() const { return radius_; }
  double diameter() const;

 private:
  Kind kind_ = Kind::unit_cube;
  Eigen::Vector3d center_ = Eigen::Vector3d::Constant(0.5);
  double radius_ = 0.0;
};

/// Physical-coordinate callback, used for densities and boundary data.
using ScalarFunction = std::function<double(const Eigen::Vector3d&)>;

/// Step along one signed stencil direction: x + h e lands on `neighbor`.
struct Step {
  double h = 1.0;
  std::size_t neighbor = 0;
};

class Grid {
 public:
  int n() const { return n_; }
  const Domain& domain() const { return domain_; }
  const Stencil& stencil() const { return stencil_; }

  std::size_t interior_count() const { return interior_.size(); }
  std::size_t boundary_count() const { return boundary_.size(); }
  /// #(X) + #(dX); indices [0, interior_count) are interior points.
  std::size_t size() const { return interior_.size() + boundary_.size(); }
  bool is_interior(std::size_t idx) const { return idx < interior_.size(); }

  const std::array<int, 3>& interior_point(std::size_t i) const { return interior_[i]; }
  /// Lattice-unit coordinates of any point of X and dX.
  Eigen::Vector3d lattice_point(std::size_t idx) const;
  Eigen::Vector3d physical_point(std::size_t idx) const { return lattice_point(idx) / n_; }

  /// sign is +1 for +e_k, -1 for -e_k.
  const Step& step(std::size_t i, std::size_t k, int sign) const {
    return steps_[(i * stencil_.size() + k) * 2 + (sign > 0 ? 0 : 1)];
  }

  /// Index of an interior lattice point, or npos.
  std::size_t interior_index(const std::array<int, 3>& x) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  friend Grid build_grid(const Domain& domain, int n, const Stencil& stencil);

  Grid(const Domain& domain, int n, Stencil stencil) : domain_(domain), n_(n), stencil_(std::move(stencil)) {}

  Domain domain_;
  int n_;
  Stencil stencil_;
  std::vector<std::array<int, 3>> interior_;
  std::vector<Eigen::Vector3d> boundary_;
  std::vector<Step> steps_;
  // Dense lookup over the lattice bounding box [lo_, lo_ + extent_).
  std::array<int, 3> lo_{};
  std::array<int, 3> extent_{};
  std::vector<std::size_t> lookup_;
};

/// Builds X, dX and all steps h_x^e for scale n >= 2. Cube exits are
/// computed in exact rational arithmetic; ball exits from the quadratic
/// root, with dX deduplicated after rounding to 1e-12 lattice units.
Grid build_grid(const Domain& domain, int n, const Stencil& stencil);

/// max h_x^e over X and the stencil, lattice units.
double sup_step(const Grid& grid);

/// Real values on X and dX. Holds a non-owning pointer to its grid, which
/// must outlive it.
class Field {
 public:
  explicit Field(const Grid& grid, double fill = 0.0);
  Field(const Grid& grid, std::vector<double> values);

  /// Samples f at the physical coordinates of every point.
  static Field sample(const Grid& grid, const ScalarFunction& f);

  const Grid& grid() const { return *grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  const Grid* grid_;
  std::vector<double> values_;
};

/// Boundary-aware second difference along stencil direction k at interior
/// point x, in domain units (the n^2 factor is applied here).
double second_difference(const Field& u, std::size_t x, std::size_t k);

/// CSV with header index,kind,x,y,z,value (physical coordinates).
void write_field_csv(std::ostream& os, const Field& u);
Field read_field_csv(std::istream& is, const Grid& grid);

}  // namespace ma3d
