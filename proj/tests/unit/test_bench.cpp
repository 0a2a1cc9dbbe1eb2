#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "ma3d/bench.hpp"
#include "ma3d/voronoi.hpp"
#include "oracles/oracles.hpp"

using namespace ma3d;

namespace {

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n' ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("test case densities match the hessian determinant") {
  const TestCase cone = make_smoothed_cone_case();
  CHECK(cone.density(Eigen::Vector3d::Constant(0.5)) == doctest::Approx(1000.0));
  const TestCase sing = make_singular_case();
  CHECK(sing.density(Eigen::Vector3d::Zero()) == doctest::Approx(std::pow(3.0, -1.5)));
  const double d123[] = {1, 2, 3};
  const TestCase quad = make_quadratic_case(SymMatrix::diagonal(d123));
  CHECK(quad.density(Eigen::Vector3d(0.2, 0.7, 0.1)) == doctest::Approx(6.0));
  CHECK(quad.boundary(Eigen::Vector3d(1, 0.5, 0)) == doctest::Approx(0.5 * (1 + 2 * 0.25)));

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (const TestCase* tc : {&cone, &sing}) {
    for (int i = 0; i < 5; ++i) {
      const Eigen::Vector3d x(unit(rng), unit(rng), unit(rng));
      const double ref = oracle::fd_hessian(tc->exact, x, 1e-4).determinant();
      CHECK(tc->density(x) == doctest::Approx(ref).epsilon(1e-4));
    }
  }
  CHECK_THROWS_AS(make_test_case("nope"), std::invalid_argument);
  CHECK_THROWS_AS(make_smoothed_cone_case(0.0), std::invalid_argument);
}

TEST_CASE("random SPD matrices") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 50; ++i) {
    const SymMatrix m = random_spd(rng, 10.0);
    CHECK(m.is_positive_definite());
    CHECK(m.kappa() <= 10.0 + 1e-9);
    CHECK(random_spd_with_kappa(rng, 8.5).kappa() == doctest::Approx(8.5).epsilon(1e-9));
  }
  std::mt19937_64 a(5), b(5);
  CHECK(random_spd(a, 4.0).dense() == random_spd(b, 4.0).dense());
  TestCaseParams p;
  p.seed = 9;
  const TestCase t1 = make_test_case("quadratic", p), t2 = make_test_case("quadratic", p);
  CHECK(t1.matrix->dense() == t2.matrix->dense());
  CHECK(t1.matrix->kappa() == doctest::Approx(8.5).epsilon(1e-9));
}

TEST_CASE("linf error") {
  const TestCase tc = make_singular_case();
  const Grid g = build_grid(Domain::unit_cube(), 6, make_table1_stencil(Table1Stencil::small));
  const Field exact = Field::sample(g, tc.exact);
  CHECK(linf_error(exact, tc) == 0.0);
  Field shifted = exact;
  for (auto& v : shifted.values()) v -= 0.25;
  CHECK(linf_error(shifted, tc) == doctest::Approx(0.25));
}

TEST_CASE("scheme labels") {
  CHECK(parse_scheme("proposed:small").label() == "proposed:small");
  CHECK(parse_scheme("proposed:large").stencil().size() == 37);
  CHECK(parse_scheme("proposed:kappa:2").kind() == SchemeKind::proposed);
  CHECK(parse_scheme("ws:large").triplets()->size() == make_ws_triplets(3).size());
  CHECK(parse_scheme("fd").kind() == SchemeKind::fd);
  CHECK_THROWS_AS(parse_scheme("fd:small"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scheme("nope"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scheme("proposed:kappa:2x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_sphere_family("sideways"), std::invalid_argument);
}

TEST_CASE("sphere family matrices") {
  const Eigen::Vector3d v = Eigen::Vector3d(1, 2, 2).normalized();
  const Eigen::Matrix3d plus = sphere_family_matrix(SphereFamily::aniso_plus, v).dense3();
  CHECK((plus * v - 36 * v).norm() < 1e-12);
  const Eigen::Matrix3d minus = sphere_family_matrix(SphereFamily::aniso_minus, v).dense3();
  CHECK((minus * v - v / 36).norm() < 1e-12);
  const SymMatrix rot = sphere_family_matrix(SphereFamily::rotated, v);
  CHECK(rot.det() == doctest::Approx(1.0));
  const auto pts = fibonacci_sphere(1000);
  CHECK(pts.size() == 1000);
  for (const auto& p : pts) CHECK(p.norm() == doctest::Approx(1.0));
}

TEST_CASE("consistency sphere maps") {
  const OperatorConfig small = OperatorConfig::proposed(make_table1_stencil(Table1Stencil::small));
  for (auto family : {SphereFamily::aniso_plus, SphereFamily::aniso_minus, SphereFamily::rotated}) {
    const auto samples = consistency_sphere_map(family, small, 400);
    REQUIRE(samples.size() == 400);
    int nonzero = 0;
    for (const auto& s : samples) {
      CHECK(s.relative_error >= -1e-12);
      CHECK(s.relative_error < 1.0);
      if (is_consistent(sphere_family_matrix(family, s.v), small.stencil())) {
        CHECK(std::abs(s.relative_error) <= 1e-9);
      }
      nonzero += s.relative_error > 1e-6 ? 1 : 0;
    }
    if (family == SphereFamily::aniso_plus) CHECK(nonzero > 0);
  }
  const auto axis = consistency_sphere_map(SphereFamily::aniso_plus, small, 1);
  CHECK(std::abs(axis.front().relative_error) < 1e-9);  // a single sample is v = e1
  const auto ws = consistency_sphere_map(SphereFamily::rotated, parse_scheme("ws:small"), 100);
  for (const auto& s : ws) CHECK(s.relative_error >= -1e-12);
  CHECK_THROWS_AS(consistency_sphere_map(SphereFamily::rotated, OperatorConfig::fd(), 10), std::invalid_argument);

  std::ostringstream os;
  write_sphere_csv(os, axis);
  CHECK(os.str().rfind("vx,vy,vz,rel_error\n", 0) == 0);
}

TEST_CASE("convergence tables") {
  const double d123[] = {1, 2, 3};
  const TestCase quad = make_quadratic_case(SymMatrix::diagonal(d123));
  const auto recs = convergence_table(quad, {parse_scheme("proposed:small"), parse_scheme("fd")}, {4, 6, 8});
  REQUIRE(recs.size() == 6);
  for (const auto& r : recs) {
    CHECK(r.converged);
    CHECK(r.linf_error <= 1e-8);
  }
  CHECK(recs[3].scheme == "fd");
  CHECK(recs[3].stencil == "-");

  NewtonConfig capped;
  capped.max_iters = 1;
  const auto failing = convergence_table(make_singular_case(), {parse_scheme("ws:small")}, {6, 8}, capped);
  REQUIRE(failing.size() == 2);
  CHECK_FALSE(failing[0].converged);

  std::ostringstream os;
  write_table_csv(os, recs);
  CHECK(os.str().rfind("case,scheme,stencil,n,linf_error,iters,seconds,converged\n", 0) == 0);
  CHECK(count_lines(os.str()) == 7);
}

TEST_CASE("Riemann sums of the cone density approach its integral") {
  const TestCase cone = make_smoothed_cone_case();
  // exact integral over the cube is close to the integral over R^3 restricted by the cube faces;
  // check convergence by successive differences instead.
  double prev = 0.0, prev_gap = 1e300;
  for (int n : {8, 16, 32, 64}) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) sum += cone.density(Eigen::Vector3d(i + 0.5, j + 0.5, k + 0.5) / n);
    sum /= static_cast<double>(n) * n * n;
    if (prev > 0.0) {
      const double gap = std::abs(sum - prev);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
    prev = sum;
  }
}
