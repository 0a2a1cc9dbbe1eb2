#pragma once

// Damped Newton solver for f(u) = y, with f the log-transformed system
// map of operators.hpp. Each step solves df(u) d = y - f(u) and takes
// u + 2^-k d for the smallest k such that the candidate stays in U0 and
//   |y - f(u_next)|_inf <= (1 - 2^-k / 2) |y - f(u)|_inf.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "ma3d/grid.hpp"
#include "ma3d/operators.hpp"

namespace ma3d {

struct NewtonConfig {
  double tol_residual = 1e-8;
  int max_iters = 200;
  int max_halvings = 60;
  double linear_tol = 1e-10;
  /// Progress lines on stderr.
  bool verbose = false;
};

struct LinearSolveStats {
  double relative_residual = 0.0;
  std::size_t eliminated_rows = 0;
  std::size_t factored_rows = 0;
};

struct SolveReport {
  int iterations = 0;
  /// Sup norm of f(u) - y, starting with the seed.
  std::vector<double> residual_history;
  /// Accepted damping 2^-k per iteration.
  std::vector<double> damping_history;
  std::vector<LinearSolveStats> linear_solve_stats;
  bool converged = false;
  double wall_time = 0.0;
  /// Why the solve stopped early; empty on convergence.
  std::string failure;
};

struct SolveResult {
  Field u;
  SolveReport report;
};

class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves A x = rhs to relative residual linear_tol. Rows holding a single
/// diagonal entry are eliminated directly; the remaining block is factored
/// with a sparse LU. Throws LinearSolveError on singularity or when the
/// tolerance is not met.
std::vector<double> linear_solve(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, std::span<const double> rhs,
                                 double linear_tol = 1e-10, LinearSolveStats* stats = nullptr);
std::vector<double> linear_solve(const SparseSystem& system, std::span<const double> rhs,
                                 double linear_tol = 1e-10, LinearSolveStats* stats = nullptr);

/// u(x) = |x|^2 in physical coordinates, on X and dX.
Field default_seed(const Grid& grid);

/// Throws NotAdmissibleError if the seed is outside U0 and
/// LinearSolveError on a singular Jacobian. Iteration and halving limits
/// end the solve with converged = false and the last iterate.
SolveResult solve(const Grid& grid, const ScalarFunction& rho, const ScalarFunction& sigma, const OperatorConfig& cfg,
                  const NewtonConfig& ncfg = {}, std::optional<Field> seed = std::nullopt);

/// min sigma - (n^-3 sum_X rho / omega_3)^(1/3) diam <= u <= max sigma over
/// X and dX, with sigma taken over dX and a 1e-10 relative slack.
bool sanity_bounds(const Field& u, const ScalarFunction& rho, const ScalarFunction& sigma);

}  // namespace ma3d
