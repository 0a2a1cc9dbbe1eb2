#pragma once

// Discrete Monge-Ampere operators on a Grid:
//   proposed  D_V u(x) = Leb{ g : 2 <g, e> <= Delta_e u(x), e in V }
//   fd        determinant of the finite-difference hessian
//   ws        min over orthogonal triplets of prod max(Delta_e u, 0) / |e|^2
// and the log-transformed system map f(u) = (ln D u on X, u on dX) with
// its sparse Jacobian.

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "ma3d/grid.hpp"
#include "ma3d/stencil.hpp"

namespace ma3d {

enum class SchemeKind { proposed, fd, ws };

class OperatorConfig {
 public:
  static OperatorConfig proposed(Stencil stencil);
  static OperatorConfig fd();
  static OperatorConfig ws(OrthogonalTripletSet triplets);

  SchemeKind kind() const { return kind_; }
  /// Stencil the grid must be built with.
  const Stencil& stencil() const { return stencil_; }
  const std::optional<OrthogonalTripletSet>& triplets() const { return triplets_; }
  /// "proposed:small", "fd", "ws:medium", ...
  std::string label() const;

  /// WS triplets as stencil indices.
  const std::vector<std::array<std::size_t, 3>>& triplet_indices() const { return triplet_idx_; }
  /// FD stencil indices: fd_index(i, i) is e_i, fd_index(i, j) for i < j is
  /// e_i + e_j and fd_index(j, i) is e_i - e_j.
  std::size_t fd_index(int i, int j) const { return fd_idx_[i][j]; }

 private:
  OperatorConfig(SchemeKind kind, Stencil stencil) : kind_(kind), stencil_(std::move(stencil)) {}

  SchemeKind kind_;
  Stencil stencil_;
  std::optional<OrthogonalTripletSet> triplets_;
  std::vector<std::array<std::size_t, 3>> triplet_idx_;
  std::array<std::array<std::size_t, 3>, 3> fd_idx_{};
};

/// The nine directions e_i, e_i + e_j, e_i - e_j.
Stencil fd_stencil();

/// D_V u(x) over the grid's stencil; optionally returns the combined facet
/// areas per direction. Zero as soon as some Delta_e u(x) <= 0.
double apply_DV(const Field& u, std::size_t x, std::vector<double>* facet_areas = nullptr);

/// Requires the grid stencil to contain the FD directions.
double apply_FD(const Field& u, std::size_t x);

/// Requires the grid stencil to contain every triplet member.
double apply_WS(const Field& u, std::size_t x, const OrthogonalTripletSet& triplets);

/// Volume of { g : <g, e> <= n^2 (u(x+e) - u(x)), +-e in V }. Defined only
/// when every x +- e is an interior point; throws std::domain_error
/// otherwise.
double apply_DV_asymmetric(const Field& u, std::size_t x);

/// Dispatches on the scheme.
double evaluate(const Field& u, std::size_t x, const OperatorConfig& cfg);

/// Point and direction where u leaves the admissible set U0.
struct Violation {
  std::size_t point = 0;
  std::size_t direction = 0;
  double value = 0.0;
};

/// U0: every Delta_e u(x) > 0 on the scheme stencil; for fd additionally
/// D^FD u(x) > 0 so that the logarithm is defined.
std::optional<Violation> find_violation(const Field& u, const OperatorConfig& cfg);

class NotAdmissibleError : public std::domain_error {
 public:
  NotAdmissibleError(const Violation& v, const LatticeVector& e, const std::string& what)
      : std::domain_error(what), violation(v), direction(e) {}
  Violation violation;
  LatticeVector direction;
};

/// y = (ln rho at X, sigma at dX), both sampled at physical coordinates.
std::vector<double> make_target(const Grid& grid, const ScalarFunction& rho, const ScalarFunction& sigma);

/// f(u) - y, or nullopt when u is outside U0.
std::optional<std::vector<double>> try_residual(const Field& u, const std::vector<double>& target,
                                                const OperatorConfig& cfg);

struct SparseSystem {
  /// f(u) - y over X and dX.
  std::vector<double> residual;
  /// df(u); boundary rows are identity rows.
  Eigen::SparseMatrix<double, Eigen::RowMajor> jacobian;
  /// D u(x) on X, linear scale.
  std::vector<double> operator_values;
};

/// Throws NotAdmissibleError when u is outside U0.
SparseSystem assemble_system(const Field& u, const std::vector<double>& target, const OperatorConfig& cfg);
SparseSystem assemble_system(const Field& u, const ScalarFunction& rho, const ScalarFunction& sigma,
                             const OperatorConfig& cfg);

}  // namespace ma3d
