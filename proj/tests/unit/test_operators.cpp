#include <doctest.h>

#include <cmath>
#include <queue>
#include <random>

#include "ma3d/bench.hpp"
#include "ma3d/operators.hpp"
#include "ma3d/polytope.hpp"
#include "ma3d/voronoi.hpp"

using namespace ma3d;

namespace {

Field quadratic(const Grid& g, const SymMatrix& m) {
  const Eigen::Matrix3d md = m.dense3();
  return Field::sample(g, [md](const Eigen::Vector3d& x) { return 0.5 * x.dot(md * x); });
}

/// u_I scaled by c plus a small random perturbation that keeps u in U0.
Field random_admissible(const Grid& g, std::mt19937_64& rng, double c = 1.0) {
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  Field u = Field::sample(g, [c](const Eigen::Vector3d& x) { return 0.5 * c * x.squaredNorm(); });
  const double amp = 0.03 * c / (static_cast<double>(g.n()) * g.n());
  for (auto& v : u.values()) v += amp * noise(rng);
  return u;
}

Eigen::MatrixXd dense_jacobian_fd(const Field& u, const OperatorConfig& cfg, double h) {
  const Grid& g = u.grid();
  const std::vector<double> zero(g.size(), 0.0);
  Eigen::MatrixXd j(g.size(), g.size());
  for (std::size_t c = 0; c < g.size(); ++c) {
    Field up = u, um = u;
    up[c] += h;
    um[c] -= h;
    const auto rp = try_residual(up, zero, cfg);
    const auto rm = try_residual(um, zero, cfg);
    REQUIRE(rp.has_value());
    REQUIRE(rm.has_value());
    for (std::size_t r = 0; r < g.size(); ++r) j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
        ((*rp)[r] - (*rm)[r]) / (2 * h);
  }
  return j;
}

}  // namespace

TEST_CASE("operator configurations") {
  const OperatorConfig p = OperatorConfig::proposed(make_table1_stencil(Table1Stencil::small));
  CHECK(p.label() == "proposed:small");
  CHECK(OperatorConfig::fd().label() == "fd");
  CHECK(OperatorConfig::ws(make_ws_triplets(2)).label() == "ws:medium");
  const OperatorConfig fd = OperatorConfig::fd();
  CHECK(fd.stencil().size() == 9);
  CHECK(fd.stencil()[fd.fd_index(0, 1)] == LatticeVector{1, 1, 0});
  CHECK(fd.stencil()[fd.fd_index(1, 0)].canonical() == LatticeVector{1, -1, 0});
  CHECK(fd.stencil()[fd.fd_index(2, 2)] == LatticeVector{0, 0, 1});
}

TEST_CASE("D_V on quadratics") {
  const Stencil small = make_table1_stencil(Table1Stencil::small);
  const Grid g = build_grid(Domain::unit_cube(), 5, small);
  const double d123[] = {1, 2, 3};
  const Field u = quadratic(g, SymMatrix::diagonal(d123));
  for (std::size_t x = 0; x < g.interior_count(); ++x) CHECK(apply_DV(u, x) == doctest::Approx(6.0).epsilon(1e-12));

  for (auto which : {Table1Stencil::small, Table1Stencil::large}) {
    const Grid gi = build_grid(Domain::unit_cube(), 4, make_table1_stencil(which));
    const Field ui = quadratic(gi, SymMatrix::identity());
    for (std::size_t x = 0; x < gi.interior_count(); ++x) {
      CHECK(apply_DV(ui, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  const double saddle[] = {1, -1, 1};
  CHECK(apply_DV(quadratic(g, SymMatrix::diagonal(saddle)), g.interior_index({2, 2, 2})) == 0.0);
}

TEST_CASE("D_V bounds det M and matches it on the consistency set") {
  const Stencil small = make_table1_stencil(Table1Stencil::small);
  const Grid g = build_grid(Domain::unit_cube(), 4, small);
  std::mt19937_64 rng(21);
  int consistent = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const SymMatrix m = random_spd(rng, 3.0);
    const Field u = quadratic(g, m);
    const double det = m.det();
    const bool cons = is_consistent(m, small);
    consistent += cons ? 1 : 0;
    const double dm = measure_D_of_matrix(m, small);
    for (std::size_t x = 0; x < g.interior_count(); ++x) {
      const double v = apply_DV(u, x);
      CHECK(v >= det * (1 - 1e-12));
      CHECK(v == doctest::Approx(dm).epsilon(1e-9));
      if (cons) CHECK(v == doctest::Approx(det).epsilon(1e-9));
    }
  }
  CHECK(consistent > 0);
}

TEST_CASE("D_V is degenerate elliptic and invariant under affine terms") {
  const Grid g = build_grid(Domain::unit_cube(), 5, make_table1_stencil(Table1Stencil::small));
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Field u = random_admissible(g, rng, 1.0 + 3 * unit(rng));
    const std::size_t x = static_cast<std::size_t>(trial) % g.interior_count();
    const double base = apply_DV(u, x);
    for (std::size_t k = 0; k < g.stencil().size(); ++k) {
      Field v = u;
      v[g.step(x, k, trial % 2 ? 1 : -1).neighbor] += 0.5 * unit(rng) / (g.n() * g.n());
      CHECK(apply_DV(v, x) >= base * (1 - 1e-12));
    }
    const Eigen::Vector3d a(unit(rng), -unit(rng), 2 * unit(rng));
    Field w = u;
    for (std::size_t i = 0; i < g.size(); ++i) w[i] += a.dot(g.physical_point(i)) + 7.0;
    CHECK(apply_DV(w, x) == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("FD operator") {
  const OperatorConfig fd = OperatorConfig::fd();
  const Grid g = build_grid(Domain::unit_cube(), 4, fd.stencil());
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix m = random_spd(rng, 5.0);
    const Field u = quadratic(g, m);
    for (std::size_t x = 0; x < g.interior_count(); ++x) {
      CHECK(apply_FD(u, x) == doctest::Approx(m.det()).epsilon(1e-9));
    }
  }
  const double indef[] = {2, 0.5, 0, -1, 0.3, 1};
  const SymMatrix mi = SymMatrix::from_upper(indef);
  CHECK(apply_FD(quadratic(g, mi), 0) == doctest::Approx(mi.det()).epsilon(1e-9));
  const Field affine = Field::sample(g, [](const Eigen::Vector3d& x) { return x.x() - 2 * x.z(); });
  CHECK(std::abs(apply_FD(affine, 3)) < 1e-12);
}

TEST_CASE("WS operator") {
  const OrthogonalTripletSet b1 = make_ws_triplets(1);
  const Grid g = build_grid(Domain::unit_cube(), 4, b1.stencil());
  const double d123[] = {1, 2, 3};
  CHECK(apply_WS(quadratic(g, SymMatrix::diagonal(d123)), 5, b1) == doctest::Approx(6.0).epsilon(1e-12));
  const double saddle[] = {-1, 1, 1};
  CHECK(apply_WS(quadratic(g, SymMatrix::diagonal(saddle)), 5, b1) == 0.0);
  std::mt19937_64 rng(24);
  const OrthogonalTripletSet b2 = make_ws_triplets(2);
  const Grid g2 = build_grid(Domain::unit_cube(), 5, b2.stencil());
  for (int trial = 0; trial < 50; ++trial) {
    const SymMatrix m = random_spd(rng, 5.0);
    CHECK(apply_WS(quadratic(g2, m), 10, b2) >= m.det() * (1 - 1e-12));
  }
}

TEST_CASE("asymmetric D_V is a translate on quadratics") {
  const Stencil small = make_table1_stencil(Table1Stencil::small);
  const Grid g = build_grid(Domain::unit_cube(), 6, small);
  const std::size_t deep = g.interior_index({3, 3, 3});
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 30; ++trial) {
    const Field u = quadratic(g, random_spd(rng, 4.0));
    CHECK(apply_DV_asymmetric(u, deep) == doctest::Approx(apply_DV(u, deep)).epsilon(1e-10));
  }
  const Field shifted = Field::sample(g, [](const Eigen::Vector3d& x) { return 0.5 * x.squaredNorm() + 3 * x.y(); });
  CHECK(apply_DV_asymmetric(shifted, deep) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(apply_DV_asymmetric(shifted, g.interior_index({1, 3, 3})), std::domain_error);
}

TEST_CASE("system on a consistent quadratic has zero interior residual") {
  const OperatorConfig cfg = OperatorConfig::proposed(make_table1_stencil(Table1Stencil::small));
  const Grid g = build_grid(Domain::unit_cube(), 5, cfg.stencil());
  const double d123[] = {1, 2, 3};
  const SymMatrix m = SymMatrix::diagonal(d123);
  const Eigen::Matrix3d md = m.dense3();
  const ScalarFunction sigma = [md](const Eigen::Vector3d& x) { return 0.5 * x.dot(md * x); };
  const SparseSystem sys = assemble_system(quadratic(g, m), [](const Eigen::Vector3d&) { return 6.0; }, sigma, cfg);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(sys.residual[i]) < 1e-12);
  const SparseSystem off = assemble_system(quadratic(g, m), [](const Eigen::Vector3d&) { return 2.0; }, sigma, cfg);
  for (std::size_t i = 0; i < g.interior_count(); ++i) CHECK(off.residual[i] == doctest::Approx(std::log(3.0)));
}

TEST_CASE("Jacobian structure and finite differences") {
  std::mt19937_64 rng(26);
  const std::vector<OperatorConfig> cfgs{OperatorConfig::proposed(make_table1_stencil(Table1Stencil::small)),
                                         OperatorConfig::proposed(make_table1_stencil(Table1Stencil::large)),
                                         OperatorConfig::fd(), OperatorConfig::ws(make_ws_triplets(1))};
  for (const auto& cfg : cfgs) {
    CAPTURE(cfg.label());
    const Grid g = build_grid(Domain::unit_cube(), 4, cfg.stencil());
    const Field u = random_admissible(g, rng, 2.0);
    const std::vector<double> zero(g.size(), 0.0);
    const SparseSystem sys = assemble_system(u, zero, cfg);
    const Eigen::MatrixXd j = Eigen::MatrixXd(sys.jacobian);
    const Eigen::MatrixXd jfd = dense_jacobian_fd(u, cfg, 1e-6);
    double worst = 0.0;
    for (Eigen::Index r = 0; r < j.rows(); ++r) {
      const double scale = j.row(r).cwiseAbs().maxCoeff();
      for (Eigen::Index c = 0; c < j.cols(); ++c) {
        worst = std::max(worst, std::abs(j(r, c) - jfd(r, c)) / std::max(std::abs(j(r, c)), 1e-3 * scale));
      }
    }
    CHECK(worst <= 1e-5);

    for (std::size_t b = g.interior_count(); b < g.size(); ++b) {
      const auto row = static_cast<Eigen::Index>(b);
      CHECK(j(row, row) == 1.0);
      CHECK(j.row(row).cwiseAbs().sum() == 1.0);
    }
    for (std::size_t x = 0; x < g.interior_count(); ++x) {
      const auto row = static_cast<Eigen::Index>(x);
      CHECK(std::abs(j.row(row).sum()) <= 1e-12 * j.row(row).cwiseAbs().sum());
      if (cfg.kind() != SchemeKind::fd) {
        for (Eigen::Index c = 0; c < j.cols(); ++c) {
          if (c != row) CHECK(j(row, c) >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("every interior row reaches a boundary row") {
  const OperatorConfig cfg = OperatorConfig::proposed(make_table1_stencil(Table1Stencil::small));
  const Grid g = build_grid(Domain::ball(Eigen::Vector3d::Constant(0.5), 0.5), 7, cfg.stencil());
  std::mt19937_64 rng(27);
  const SparseSystem sys = assemble_system(random_admissible(g, rng), std::vector<double>(g.size(), 0.0), cfg);
  // reverse reachability from the boundary rows
  std::vector<std::vector<std::size_t>> preds(g.size());
  for (Eigen::Index r = 0; r < sys.jacobian.outerSize(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sys.jacobian, r); it; ++it) {
      if (it.value() != 0.0 && it.col() != r) preds[static_cast<std::size_t>(it.col())].push_back(static_cast<std::size_t>(r));
    }
  }
  std::vector<bool> reach(g.size(), false);
  std::queue<std::size_t> q;
  for (std::size_t b = g.interior_count(); b < g.size(); ++b) {
    reach[b] = true;
    q.push(b);
  }
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop();
    for (std::size_t p : preds[v]) {
      if (!reach[p]) {
        reach[p] = true;
        q.push(p);
      }
    }
  }
  for (std::size_t x = 0; x < g.interior_count(); ++x) CHECK(reach[x]);
}

TEST_CASE("admissibility") {
  const OperatorConfig cfg = OperatorConfig::proposed(make_table1_stencil(Table1Stencil::small));
  const Grid g = build_grid(Domain::unit_cube(), 4, cfg.stencil());
  const double saddle[] = {1, -1, 1};
  const Field u = quadratic(g, SymMatrix::diagonal(saddle));
  const auto v = find_violation(u, cfg);
  REQUIRE(v.has_value());
  CHECK(v->value <= 0.0);
  CHECK_FALSE(try_residual(u, std::vector<double>(g.size(), 0.0), cfg).has_value());
  try {
    assemble_system(u, std::vector<double>(g.size(), 0.0), cfg);
    FAIL("expected NotAdmissibleError");
  } catch (const NotAdmissibleError& e) {
    CHECK(e.violation.point < g.interior_count());
    CHECK(g.stencil().contains(e.direction));
  }
  CHECK_THROWS_AS(make_target(g, [](const Eigen::Vector3d&) { return 0.0; },
                              [](const Eigen::Vector3d&) { return 0.0; }),
                  std::invalid_argument);
  const Grid wrong = build_grid(Domain::unit_cube(), 4, make_table1_stencil(Table1Stencil::large));
  CHECK_THROWS(evaluate(Field(wrong, 1.0), 0, cfg));
}
