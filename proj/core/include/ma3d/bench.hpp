#pragma once

// Synthetic test cases on the unit cube, error metrics, consistency maps
// over the unit sphere, and convergence tables.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "ma3d/grid.hpp"
#include "ma3d/newton.hpp"
#include "ma3d/operators.hpp"
#include "ma3d/stencil.hpp"

namespace ma3d {

enum class TestCaseKind { quadratic, smoothed_cone, singular };

/// Known convex U with rho = det(hessian U) in closed form, sigma = U.
struct TestCase {
  std::string name;
  TestCaseKind kind = TestCaseKind::quadratic;
  ScalarFunction exact;
  ScalarFunction density;
  ScalarFunction boundary;
  /// Hessian of the quadratic case.
  std::optional<SymMatrix> matrix;
};

struct TestCaseParams {
  /// Quadratic case; when absent a random matrix with the given kappa is
  /// drawn from `seed`.
  std::optional<SymMatrix> matrix;
  double kappa = 8.5;
  std::uint64_t seed = 1;
  /// Smoothed cone.
  double delta = 0.1;
  Eigen::Vector3d apex = Eigen::Vector3d::Constant(0.5);
};

/// name is one of "quadratic", "cone" (or "smoothed_cone"), "singular".
TestCase make_test_case(std::string_view name, const TestCaseParams& params = {});
TestCase make_quadratic_case(const SymMatrix& m);
TestCase make_smoothed_cone_case(double delta = 0.1, const Eigen::Vector3d& apex = Eigen::Vector3d::Constant(0.5));
TestCase make_singular_case();

/// max over X of |u(x) - U(x / n)|.
double linf_error(const Field& u, const TestCase& tc);

/// Q diag(lambda) Q^T with Q from the QR factorization of a Gaussian
/// matrix and log-uniform eigenvalues in [1, kappa_max^2], so that
/// kappa(M) <= kappa_max.
SymMatrix random_spd(std::mt19937_64& rng, double kappa_max);
/// Same construction with kappa(M) equal to kappa.
SymMatrix random_spd_with_kappa(std::mt19937_64& rng, double kappa);

/// "proposed:small", "proposed:large", "proposed:kappa:<k>", "fd",
/// "ws:small", "ws:medium", "ws:large". Throws std::invalid_argument.
OperatorConfig parse_scheme(std::string_view label);

enum class SphereFamily { aniso_plus, aniso_minus, rotated };

SphereFamily parse_sphere_family(std::string_view name);
/// aniso_plus: eigenvalues 36, 1, 1 with eigenvector v; aniso_minus:
/// 1/36, 1, 1; rotated: R D R with R the half-turn about v and
/// D = diag(6, 1, 1/6).
SymMatrix sphere_family_matrix(SphereFamily family, const Eigen::Vector3d& v);
std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t count);

struct SphereSample {
  Eigen::Vector3d v;
  double relative_error = 0.0;
};

/// (D u_M - det M) / D u_M at a deep interior point of a small cube grid,
/// for M = M(v) and v on a Fibonacci sphere. Proposed and ws schemes only.
std::vector<SphereSample> consistency_sphere_map(SphereFamily family, const OperatorConfig& scheme,
                                                 std::size_t samples = 1000);
void write_sphere_csv(std::ostream& os, const std::vector<SphereSample>& samples);

struct RunRecord {
  std::string case_name;
  std::string scheme;
  std::string stencil;
  int n = 0;
  double linf_error = 0.0;
  int iters = 0;
  double seconds = 0.0;
  bool converged = false;
};

/// One Newton solve per (scheme, n). A failing run is recorded with
/// converged = false and never aborts the table.
std::vector<RunRecord> convergence_table(const TestCase& tc, const std::vector<OperatorConfig>& schemes,
                                         const std::vector<int>& resolutions, const NewtonConfig& ncfg = {});
RunRecord run_case(const TestCase& tc, const OperatorConfig& scheme, int n, const NewtonConfig& ncfg = {});
void write_table_csv(std::ostream& os, const std::vector<RunRecord>& records);

}  // namespace ma3d
