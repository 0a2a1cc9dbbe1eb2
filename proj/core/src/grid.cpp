#include "ma3d/grid.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ma3d {

Domain Domain::unit_cube() { return Domain{}; }

Domain Domain::ball(const Eigen::Vector3d& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  Domain d;
  d.kind_ = Kind::ball;
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

double Domain::diameter() const { return kind_ == Kind::unit_cube ? std::sqrt(3.0) : 2.0 * radius_; }

Eigen::Vector3d Grid::lattice_point(std::size_t idx) const {
  if (idx < interior_.size()) {
    const auto& p = interior_[idx];
    return {static_cast<double>(p[0]), static_cast<double>(p[1]), static_cast<double>(p[2])};
  }
  return boundary_.at(idx - interior_.size());
}

std::size_t Grid::interior_index(const std::array<int, 3>& x) const {
  std::size_t flat = 0;
  for (int i = 0; i < 3; ++i) {
    const int o = x[i] - lo_[i];
    if (o < 0 || o >= extent_[i]) return npos;
    flat = flat * static_cast<std::size_t>(extent_[i]) + static_cast<std::size_t>(o);
  }
  return lookup_[flat];
}

namespace {

using BoundaryKey = std::array<long long, 4>;

struct Fraction {
  long long num;
  long long den;  // > 0
  bool operator<(const Fraction& o) const { return num * o.den < o.num * den; }
};

}  // namespace

Grid build_grid(const Domain& domain, int n, const Stencil& stencil) {
  if (n < 2) throw std::invalid_argument("grid scale n must be >= 2");
  if (stencil.dim() != 3) throw std::invalid_argument("grids are three dimensional");
  Grid g(domain, n, stencil);

  const bool cube = domain.kind() == Domain::Kind::unit_cube;
  const Eigen::Vector3d centre = domain.center() * n;
  const double radius = domain.radius() * n;
  auto inside = [&](const std::array<int, 3>& x) {
    if (cube) return x[0] > 0 && x[0] < n && x[1] > 0 && x[1] < n && x[2] > 0 && x[2] < n;
    const Eigen::Vector3d p(x[0], x[1], x[2]);
    return (p - centre).squaredNorm() < radius * radius;
  };

  if (cube) {
    g.lo_ = {1, 1, 1};
    g.extent_ = {n - 1, n - 1, n - 1};
  } else {
    for (int i = 0; i < 3; ++i) {
      g.lo_[i] = static_cast<int>(std::floor(centre(i) - radius)) - 1;
      g.extent_[i] = static_cast<int>(std::ceil(centre(i) + radius)) + 2 - g.lo_[i];
    }
  }
  g.lookup_.assign(static_cast<std::size_t>(g.extent_[0]) * g.extent_[1] * g.extent_[2], Grid::npos);
  for (int a = 0; a < g.extent_[0]; ++a) {
    for (int b = 0; b < g.extent_[1]; ++b) {
      for (int c = 0; c < g.extent_[2]; ++c) {
        const std::array<int, 3> x{g.lo_[0] + a, g.lo_[1] + b, g.lo_[2] + c};
        if (!inside(x)) continue;
        g.lookup_[(static_cast<std::size_t>(a) * g.extent_[1] + b) * g.extent_[2] + c] = g.interior_.size();
        g.interior_.push_back(x);
      }
    }
  }
  if (g.interior_.empty()) throw std::invalid_argument("grid has an empty interior");

  const std::size_t m = stencil.size();
  const std::size_t nx = g.interior_.size();
  std::map<BoundaryKey, std::size_t> boundary_index;
  std::vector<Eigen::Vector3d> boundary;
  auto boundary_point = [&](const BoundaryKey& key, const Eigen::Vector3d& p) {
    auto [it, fresh] = boundary_index.emplace(key, boundary.size());
    if (fresh) boundary.push_back(p);
    return nx + it->second;
  };

  g.steps_.resize(nx * m * 2);
  for (std::size_t i = 0; i < nx; ++i) {
    const auto& x = g.interior_[i];
    for (std::size_t k = 0; k < m; ++k) {
      for (int sign : {1, -1}) {
        std::array<int, 3> e{};
        for (int j = 0; j < 3; ++j) e[j] = sign * stencil[k][j];
        const std::array<int, 3> y{x[0] + e[0], x[1] + e[1], x[2] + e[2]};
        Step& s = g.steps_[(i * m + k) * 2 + (sign > 0 ? 0 : 1)];
        if (inside(y)) {
          s = {1.0, g.interior_index(y)};
          continue;
        }
        if (cube) {
          // Exit parameter min_j (face_j - x_j) / e_j, exactly.
          Fraction t{std::numeric_limits<int>::max(), 1};
          for (int j = 0; j < 3; ++j) {
            if (e[j] == 0) continue;
            Fraction tj = e[j] > 0 ? Fraction{n - x[j], e[j]} : Fraction{x[j], -e[j]};
            if (tj < t) t = tj;
          }
          BoundaryKey key{};
          long long gcd = t.den;
          for (int j = 0; j < 3; ++j) {
            key[j] = x[j] * t.den + t.num * e[j];
            gcd = std::gcd(gcd, key[j]);
          }
          key[3] = t.den;
          for (auto& v : key) v /= gcd;
          const double h = static_cast<double>(t.num) / static_cast<double>(t.den);
          const Eigen::Vector3d p(static_cast<double>(key[0]) / key[3], static_cast<double>(key[1]) / key[3],
                                  static_cast<double>(key[2]) / key[3]);
          s = {h, boundary_point(key, p)};
        } else {
          const Eigen::Vector3d px(x[0], x[1], x[2]);
          const Eigen::Vector3d pe(e[0], e[1], e[2]);
          const Eigen::Vector3d r = px - centre;
          const double a = pe.squaredNorm();
          const double b = pe.dot(r);
          const double c = r.squaredNorm() - radius * radius;
          const double h = std::min(1.0, (-b + std::sqrt(b * b - a * c)) / a);
          const Eigen::Vector3d p = px + h * pe;
          BoundaryKey key{std::llround(p.x() * 1e12), std::llround(p.y() * 1e12), std::llround(p.z() * 1e12), 0};
          s = {h, boundary_point(key, p)};
        }
      }
    }
  }
  g.boundary_ = std::move(boundary);
  return g;
}

double sup_step(const Grid& grid) {
  double h = 0.0;
  for (std::size_t i = 0; i < grid.interior_count(); ++i) {
    for (std::size_t k = 0; k < grid.stencil().size(); ++k) {
      h = std::max({h, grid.step(i, k, 1).h, grid.step(i, k, -1).h});
    }
  }
  return h;
}

// ---------------------------------------------------------------------------

Field::Field(const Grid& grid, double fill) : grid_(&grid), values_(grid.size(), fill) {}

Field::Field(const Grid& grid, std::vector<double> values) : grid_(&grid), values_(std::move(values)) {
  if (values_.size() != grid.size()) throw std::invalid_argument("field length must equal #(X) + #(dX)");
}

Field Field::sample(const Grid& grid, const ScalarFunction& f) {
  Field u(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) u[i] = f(grid.physical_point(i));
  return u;
}

double second_difference(const Field& u, std::size_t x, std::size_t k) {
  const Grid& g = u.grid();
  const Step& sp = g.step(x, k, 1);
  const Step& sm = g.step(x, k, -1);
  const double ux = u[x];
  const double n2 = static_cast<double>(g.n()) * g.n();
  return n2 * 2.0 / (sp.h + sm.h) * ((u[sp.neighbor] - ux) / sp.h + (u[sm.neighbor] - ux) / sm.h);
}

void write_field_csv(std::ostream& os, const Field& u) {
  const Grid& g = u.grid();
  os << "index,kind,x,y,z,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Eigen::Vector3d p = g.physical_point(i);
    os << i << ',' << (g.is_interior(i) ? "interior" : "boundary") << ',' << p.x() << ',' << p.y() << ','
       << p.z() << ',' << u[i] << '\n';
  }
}

Field read_field_csv(std::istream& is, const Grid& grid) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("index,", 0) != 0) {
    throw std::invalid_argument("field CSV must start with the index,kind,x,y,z,value header");
  }
  Field u(grid);
  std::size_t count = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw std::invalid_argument("field CSV rows need 6 columns");
    const std::size_t idx = std::stoull(cells[0]);
    if (idx != count || idx >= grid.size()) throw std::invalid_argument("field CSV index out of order");
    u[idx] = std::stod(cells[5]);
    ++count;
  }
  if (count != grid.size()) throw std::invalid_argument("field CSV does not cover the grid");
  return u;
}

}  // namespace ma3d
