#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "ma3d/bench.hpp"
#include "ma3d/grid.hpp"

using namespace ma3d;

namespace {

std::size_t dir(const Stencil& s, const LatticeVector& e) { return *s.index_of(e); }
int sign_of(const Stencil& s, const LatticeVector& e) { return s[dir(s, e)] == e ? 1 : -1; }

bool on_cube_boundary(const Eigen::Vector3d& p, int n) {
  bool inside = true, touches = false;
  for (int i = 0; i < 3; ++i) {
    inside = inside && p(i) >= -1e-12 && p(i) <= n + 1e-12;
    touches = touches || std::abs(p(i)) <= 1e-12 || std::abs(p(i) - n) <= 1e-12;
  }
  return inside && touches;
}

}  // namespace

TEST_CASE("cube steps near the boundary") {
  const Grid small = build_grid(Domain::unit_cube(), 4, make_table1_stencil(Table1Stencil::small));
  const std::size_t x = small.interior_index({1, 1, 1});
  const LatticeVector e{-1, 0, 0};
  const Step& st = small.step(x, dir(small.stencil(), e), sign_of(small.stencil(), e));
  CHECK(st.h == 1.0);
  CHECK_FALSE(small.is_interior(st.neighbor));
  CHECK(small.lattice_point(st.neighbor) == Eigen::Vector3d(0, 1, 1));

  const Grid large = build_grid(Domain::unit_cube(), 4, make_table1_stencil(Table1Stencil::large));
  const std::size_t xl = large.interior_index({1, 1, 1});
  const LatticeVector f{-2, 1, 0};
  const Step& sl = large.step(xl, dir(large.stencil(), f), sign_of(large.stencil(), f));
  CHECK(sl.h == 0.5);
  CHECK_FALSE(large.is_interior(sl.neighbor));
  CHECK((large.lattice_point(sl.neighbor) - Eigen::Vector3d(0, 1.5, 1)).norm() < 1e-15);

  const std::size_t c = small.interior_index({2, 2, 2});
  const LatticeVector g{1, 1, 1};
  const Step& sc = small.step(c, dir(small.stencil(), g), 1);
  CHECK(sc.h == 1.0);
  CHECK(sc.neighbor == small.interior_index({3, 3, 3}));
}

TEST_CASE("cube point counts and sup step") {
  for (int n : {2, 3, 4, 8}) {
    const Grid g = build_grid(Domain::unit_cube(), n, make_table1_stencil(Table1Stencil::small));
    CHECK(g.interior_count() == static_cast<std::size_t>((n - 1) * (n - 1) * (n - 1)));
    CHECK(sup_step(g) == 1.0);
  }
  CHECK(sup_step(build_grid(Domain::unit_cube(), 4, make_table1_stencil(Table1Stencil::large))) == 1.0);
  CHECK_THROWS_AS(build_grid(Domain::unit_cube(), 1, make_table1_stencil(Table1Stencil::small)),
                  std::invalid_argument);
}

TEST_CASE("boundary set is exactly the set of first hits") {
  for (auto domain : {Domain::unit_cube(), Domain::ball(Eigen::Vector3d::Constant(0.5), 0.45)}) {
    const Grid g = build_grid(domain, 7, make_table1_stencil(Table1Stencil::large));
    std::set<std::size_t> hit;
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
      const Eigen::Vector3d x = g.lattice_point(i);
      for (std::size_t k = 0; k < g.stencil().size(); ++k) {
        for (int sgn : {1, -1}) {
          const Step& st = g.step(i, k, sgn);
          CHECK(st.h > 0.0);
          CHECK(st.h <= 1.0);
          const Eigen::Vector3d y = x + sgn * st.h * g.stencil()[k].to_vector3d();
          CHECK((g.lattice_point(st.neighbor) - y).norm() < 1e-9);
          if (!g.is_interior(st.neighbor)) hit.insert(st.neighbor);
          const bool unit_interior = [&] {
            const Eigen::Vector3d z = x + sgn * g.stencil()[k].to_vector3d();
            const std::size_t j = g.interior_index({static_cast<int>(z.x()), static_cast<int>(z.y()),
                                                    static_cast<int>(z.z())});
            return j != Grid::npos;
          }();
          if (unit_interior) CHECK(st.h == 1.0);
        }
      }
    }
    CHECK(hit.size() == g.boundary_count());
    for (std::size_t b = g.interior_count(); b < g.size(); ++b) {
      const Eigen::Vector3d p = g.lattice_point(b);
      if (domain.kind() == Domain::Kind::unit_cube) {
        CHECK(on_cube_boundary(p, g.n()));
      } else {
        CHECK(std::abs((p - domain.center() * g.n()).norm() - domain.radius() * g.n()) < 1e-9);
      }
    }
  }
}

TEST_CASE("ball sup step lies in (0, 1]") {
  const Grid g = build_grid(Domain::ball(Eigen::Vector3d::Constant(0.5), 0.5), 8,
                            make_table1_stencil(Table1Stencil::small));
  const double h = sup_step(g);
  CHECK(h > 0.0);
  CHECK(h <= 1.0);
  CHECK(Domain::ball(Eigen::Vector3d::Zero(), 2.0).diameter() == 4.0);
  CHECK(Domain::unit_cube().diameter() == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("second differences are exact on quadratics") {
  std::mt19937_64 rng(3);
  for (auto domain : {Domain::unit_cube(), Domain::ball(Eigen::Vector3d::Constant(0.5), 0.5)}) {
    const Grid g = build_grid(domain, 6, make_table1_stencil(Table1Stencil::large));
    const SymMatrix m = random_spd(rng, 4.0);
    const Eigen::Matrix3d md = m.dense3();
    const Eigen::Vector3d a(0.3, -1.2, 2.0);
    const Field u = Field::sample(g, [&](const Eigen::Vector3d& x) { return 0.5 * x.dot(md * x) + a.dot(x) + 4; });
    const Field affine = Field::sample(g, [&](const Eigen::Vector3d& x) { return a.dot(x) - 1; });
    for (std::size_t i = 0; i < g.interior_count(); ++i) {
      for (std::size_t k = 0; k < g.stencil().size(); ++k) {
        const double expected = m.quad(g.stencil()[k]);
        CHECK(std::abs(second_difference(u, i, k) - expected) <= 1e-9 * expected);
        CHECK(std::abs(second_difference(affine, i, k)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("second difference of a bump") {
  const int n = 5;
  const Grid g = build_grid(Domain::unit_cube(), n, make_table1_stencil(Table1Stencil::small));
  const std::size_t x = g.interior_index({2, 2, 2});
  Field u(g, 0.0);
  u[x] = 1.0;
  for (std::size_t k = 0; k < g.stencil().size(); ++k) CHECK(second_difference(u, x, k) == -2.0 * n * n);
}

TEST_CASE("field CSV round trip") {
  const Grid g = build_grid(Domain::unit_cube(), 3, make_table1_stencil(Table1Stencil::small));
  const Field u = Field::sample(g, [](const Eigen::Vector3d& x) { return std::exp(x.sum()); });
  std::stringstream ss;
  write_field_csv(ss, u);
  const Field back = read_field_csv(ss, g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-14));
  std::stringstream bad("nope\n");
  CHECK_THROWS(read_field_csv(bad, g));
}
