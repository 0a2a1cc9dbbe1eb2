#include "ma3d/operators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>

#include "ma3d/parallel.hpp"
#include "ma3d/polytope.hpp"

namespace ma3d {

namespace {

std::size_t require_index(const Stencil& stencil, const LatticeVector& e, const char* scheme) {
  auto k = stencil.index_of(e);
  if (!k) {
    std::ostringstream msg;
    msg << scheme << " needs direction " << e << " in the grid stencil '" << stencil.label() << "'";
    throw std::invalid_argument(msg.str());
  }
  return *k;
}

std::array<std::array<std::size_t, 3>, 3> fd_indices(const Stencil& stencil) {
  std::array<std::array<std::size_t, 3>, 3> idx{};
  for (int i = 0; i < 3; ++i) {
    std::array<int, 3> ei{};
    ei[i] = 1;
    idx[i][i] = require_index(stencil, LatticeVector{std::span<const int>(ei)}, "fd");
    for (int j = i + 1; j < 3; ++j) {
      std::array<int, 3> p = ei;
      std::array<int, 3> q = ei;
      p[j] = 1;
      q[j] = -1;
      idx[i][j] = require_index(stencil, LatticeVector{std::span<const int>(p)}, "fd");
      idx[j][i] = require_index(stencil, LatticeVector{std::span<const int>(q)}, "fd");
    }
  }
  return idx;
}

std::vector<std::array<std::size_t, 3>> ws_indices(const Stencil& stencil, const OrthogonalTripletSet& b) {
  std::vector<std::array<std::size_t, 3>> out;
  out.reserve(b.size());
  for (const auto& t : b.triplets()) {
    out.push_back({require_index(stencil, t[0], "ws"), require_index(stencil, t[1], "ws"),
                   require_index(stencil, t[2], "ws")});
  }
  return out;
}

std::vector<double> differences(const Field& u, std::size_t x) {
  const std::size_t m = u.grid().stencil().size();
  std::vector<double> b(m);
  for (std::size_t k = 0; k < m; ++k) b[k] = second_difference(u, x, k);
  return b;
}

Eigen::Matrix3d fd_hessian(const std::vector<double>& b, const std::array<std::array<std::size_t, 3>, 3>& idx) {
  Eigen::Matrix3d h;
  for (int i = 0; i < 3; ++i) {
    h(i, i) = b[idx[i][i]];
    for (int j = i + 1; j < 3; ++j) {
      h(i, j) = h(j, i) = 0.25 * (b[idx[i][j]] - b[idx[j][i]]);
    }
  }
  return h;
}

// Smallest triplet product and the minimising triplet (first on ties).
std::pair<double, std::size_t> ws_min(const std::vector<double>& b, const Stencil& stencil,
                                      const std::vector<std::array<std::size_t, 3>>& tri) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t t = 0; t < tri.size(); ++t) {
    double p = 1.0;
    for (std::size_t k : tri[t]) p *= std::max(b[k], 0.0) / static_cast<double>(stencil[k].norm2());
    if (p < best) {
      best = p;
      arg = t;
    }
  }
  return {best, arg};
}

void require_matching_grid(const Field& u, const OperatorConfig& cfg) {
  if (u.grid().stencil().size() != cfg.stencil().size() || u.grid().stencil().label() != cfg.stencil().label()) {
    throw std::invalid_argument("grid was not built with the stencil of scheme " + cfg.label());
  }
}

// d ln D u(x) / d Delta_k u(x) for the directions that matter.
struct RowGradient {
  double value = 0.0;  // D u(x)
  std::vector<std::pair<std::size_t, double>> dlog;
};

RowGradient row_gradient(const Field& u, std::size_t x, const OperatorConfig& cfg, const std::vector<double>& b) {
  RowGradient out;
  const Stencil& stencil = cfg.stencil();
  switch (cfg.kind()) {
    case SchemeKind::proposed: {
      const PolytopeMeasure pm = measure_polytope(stencil, b);
      out.value = pm.volume;
      if (!(pm.volume > 0.0)) break;
      // d vol / d b_e = area(F_e u F_-e) / (2 |e|)
      for (std::size_t k = 0; k < stencil.size(); ++k) {
        if (pm.facet_area[k] > 0.0) {
          out.dlog.emplace_back(k, pm.facet_area[k] / (2.0 * stencil[k].norm() * pm.volume));
        }
      }
      break;
    }
    case SchemeKind::fd: {
      std::array<std::array<std::size_t, 3>, 3> idx{};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) idx[i][j] = cfg.fd_index(i, j);
      }
      const Eigen::Matrix3d h = fd_hessian(b, idx);
      out.value = h.determinant();
      if (out.value == 0.0) break;
      // d ln det / d h_ij = (h^-1)_ji
      const Eigen::Matrix3d inv = h.inverse();
      for (int i = 0; i < 3; ++i) {
        out.dlog.emplace_back(idx[i][i], inv(i, i));
        for (int j = i + 1; j < 3; ++j) {
          out.dlog.emplace_back(idx[i][j], 0.5 * inv(i, j));
          out.dlog.emplace_back(idx[j][i], -0.5 * inv(i, j));
        }
      }
      break;
    }
    case SchemeKind::ws: {
      const auto [value, arg] = ws_min(b, stencil, cfg.triplet_indices());
      out.value = value;
      for (std::size_t k : cfg.triplet_indices()[arg]) {
        if (b[k] > 0.0) out.dlog.emplace_back(k, 1.0 / b[k]);
      }
      break;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Stencil fd_stencil() {
  return Stencil("fd", {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, -1, 0}, {1, 0, 1}, {1, 0, -1}, {0, 1, 1},
                        {0, 1, -1}});
}

OperatorConfig OperatorConfig::proposed(Stencil stencil) {
  if (stencil.dim() != 3) throw std::invalid_argument("schemes are three dimensional");
  return OperatorConfig(SchemeKind::proposed, std::move(stencil));
}

OperatorConfig OperatorConfig::fd() {
  OperatorConfig cfg(SchemeKind::fd, fd_stencil());
  cfg.fd_idx_ = fd_indices(cfg.stencil_);
  return cfg;
}

OperatorConfig OperatorConfig::ws(OrthogonalTripletSet triplets) {
  OperatorConfig cfg(SchemeKind::ws, triplets.stencil());
  cfg.triplet_idx_ = ws_indices(cfg.stencil_, triplets);
  cfg.triplets_ = std::move(triplets);
  return cfg;
}

std::string OperatorConfig::label() const {
  switch (kind_) {
    case SchemeKind::proposed:
      return "proposed:" + stencil_.label();
    case SchemeKind::fd:
      return "fd";
    case SchemeKind::ws:
      return "ws:" + triplets_->label();
  }
  return {};
}

double apply_DV(const Field& u, std::size_t x, std::vector<double>* facet_areas) {
  const auto b = differences(u, x);
  PolytopeMeasure pm = measure_polytope(u.grid().stencil(), b);
  if (facet_areas) *facet_areas = std::move(pm.facet_area);
  return pm.volume;
}

double apply_FD(const Field& u, std::size_t x) {
  const auto idx = fd_indices(u.grid().stencil());
  return fd_hessian(differences(u, x), idx).determinant();
}

double apply_WS(const Field& u, std::size_t x, const OrthogonalTripletSet& triplets) {
  const Stencil& stencil = u.grid().stencil();
  return ws_min(differences(u, x), stencil, ws_indices(stencil, triplets)).first;
}

double apply_DV_asymmetric(const Field& u, std::size_t x) {
  const Grid& g = u.grid();
  const Stencil& stencil = g.stencil();
  const double n2 = static_cast<double>(g.n()) * g.n();
  std::vector<double> plus(stencil.size());
  std::vector<double> minus(stencil.size());
  for (std::size_t k = 0; k < stencil.size(); ++k) {
    const Step& sp = g.step(x, k, 1);
    const Step& sm = g.step(x, k, -1);
    if (sp.h != 1.0 || sm.h != 1.0 || !g.is_interior(sp.neighbor) || !g.is_interior(sm.neighbor)) {
      std::ostringstream msg;
      msg << "asymmetric operator undefined at point " << x << ": x +- " << stencil[k]
          << " is not an interior point";
      throw std::domain_error(msg.str());
    }
    plus[k] = n2 * (u[sp.neighbor] - u[x]);
    minus[k] = n2 * (u[sm.neighbor] - u[x]);
  }
  return measure_asymmetric_polytope(stencil, plus, minus);
}

double evaluate(const Field& u, std::size_t x, const OperatorConfig& cfg) {
  require_matching_grid(u, cfg);
  const auto b = differences(u, x);
  switch (cfg.kind()) {
    case SchemeKind::proposed:
      return measure_polytope(cfg.stencil(), b).volume;
    case SchemeKind::fd: {
      std::array<std::array<std::size_t, 3>, 3> idx{};
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) idx[i][j] = cfg.fd_index(i, j);
      }
      return fd_hessian(b, idx).determinant();
    }
    case SchemeKind::ws:
      return ws_min(b, cfg.stencil(), cfg.triplet_indices()).first;
  }
  return 0.0;
}

std::optional<Violation> find_violation(const Field& u, const OperatorConfig& cfg) {
  require_matching_grid(u, cfg);
  const Grid& g = u.grid();
  for (std::size_t x = 0; x < g.interior_count(); ++x) {
    for (std::size_t k = 0; k < g.stencil().size(); ++k) {
      const double d = second_difference(u, x, k);
      if (!(d > 0.0)) return Violation{x, k, d};
    }
    if (cfg.kind() == SchemeKind::fd) {
      const double v = evaluate(u, x, cfg);
      if (!(v > 0.0)) return Violation{x, 0, v};
    }
  }
  return std::nullopt;
}

std::vector<double> make_target(const Grid& grid, const ScalarFunction& rho, const ScalarFunction& sigma) {
  std::vector<double> y(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Eigen::Vector3d p = grid.physical_point(i);
    if (grid.is_interior(i)) {
      const double r = rho(p);
      if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("density must be positive and finite on X");
      y[i] = std::log(r);
    } else {
      y[i] = sigma(p);
    }
  }
  return y;
}

std::optional<std::vector<double>> try_residual(const Field& u, const std::vector<double>& target,
                                                const OperatorConfig& cfg) {
  if (find_violation(u, cfg)) return std::nullopt;
  const Grid& g = u.grid();
  std::vector<double> r(g.size());
  std::atomic<bool> ok = true;
  parallel_for(g.interior_count(), [&](std::size_t x) {
    const double v = evaluate(u, x, cfg);
    if (!(v > 0.0)) ok = false;
    r[x] = std::log(v) - target[x];
  });
  if (!ok) return std::nullopt;
  for (std::size_t i = g.interior_count(); i < g.size(); ++i) r[i] = u[i] - target[i];
  return r;
}

SparseSystem assemble_system(const Field& u, const std::vector<double>& target, const OperatorConfig& cfg) {
  require_matching_grid(u, cfg);
  const Grid& g = u.grid();
  if (target.size() != g.size()) throw std::invalid_argument("target length must equal #(X) + #(dX)");
  if (auto v = find_violation(u, cfg)) {
    const LatticeVector& e = g.stencil()[v->direction];
    std::ostringstream msg;
    if (cfg.kind() == SchemeKind::fd && v->value <= 0.0 && second_difference(u, v->point, v->direction) > 0.0) {
      msg << "u is outside U0: D^FD u = " << v->value << " at interior point " << v->point;
    } else {
      msg << "u is outside U0: Delta_" << e << " u = " << v->value << " <= 0 at interior point " << v->point;
    }
    throw NotAdmissibleError(*v, e, msg.str());
  }

  const std::size_t nx = g.interior_count();
  const double n2 = static_cast<double>(g.n()) * g.n();
  SparseSystem sys;
  sys.residual.assign(g.size(), 0.0);
  sys.operator_values.assign(nx, 0.0);
  std::vector<std::vector<Eigen::Triplet<double>>> rows(nx);

  parallel_for(nx, [&](std::size_t x) {
    const auto b = differences(u, x);
    const RowGradient rg = row_gradient(u, x, cfg, b);
    sys.operator_values[x] = rg.value;
    sys.residual[x] = std::log(rg.value) - target[x];
    auto& row = rows[x];
    double diag = 0.0;
    for (const auto& [k, dlog] : rg.dlog) {
      const Step& sp = g.step(x, k, 1);
      const Step& sm = g.step(x, k, -1);
      const double s = sp.h + sm.h;
      const double wp = dlog * n2 * 2.0 / (sp.h * s);
      const double wm = dlog * n2 * 2.0 / (sm.h * s);
      row.emplace_back(static_cast<int>(x), static_cast<int>(sp.neighbor), wp);
      row.emplace_back(static_cast<int>(x), static_cast<int>(sm.neighbor), wm);
      diag -= wp + wm;
    }
    row.emplace_back(static_cast<int>(x), static_cast<int>(x), diag);
  });

  std::vector<Eigen::Triplet<double>> all;
  for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
  for (std::size_t i = nx; i < g.size(); ++i) {
    sys.residual[i] = u[i] - target[i];
    all.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  }
  sys.jacobian.resize(static_cast<Eigen::Index>(g.size()), static_cast<Eigen::Index>(g.size()));
  sys.jacobian.setFromTriplets(all.begin(), all.end());
  return sys;
}

SparseSystem assemble_system(const Field& u, const ScalarFunction& rho, const ScalarFunction& sigma,
                             const OperatorConfig& cfg) {
  return assemble_system(u, make_target(u.grid(), rho, sigma), cfg);
}

}  // namespace ma3d
