#include "ma3d/newton.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>

namespace ma3d {

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double relative_residual(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& b) {
  const double nb = b.norm();
  return nb > 0.0 ? (a * x - b).norm() / nb : (a * x).norm();
}

}  // namespace

std::vector<double> linear_solve(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a, std::span<const double> rhs,
                                 double linear_tol, LinearSolveStats* stats) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || static_cast<Eigen::Index>(rhs.size()) != n) {
    throw std::invalid_argument("linear_solve: dimension mismatch");
  }
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), n);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);

  // Rows with a lone diagonal entry are solved in place.
  std::vector<Eigen::Index> reduced(static_cast<std::size_t>(n), -1);
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index count = 0;
    double diag = 0.0;
    bool off_diagonal = false;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a, i); it; ++it) {
      if (it.value() == 0.0) continue;
      ++count;
      if (it.col() == i) {
        diag = it.value();
      } else {
        off_diagonal = true;
      }
    }
    if (count == 1 && !off_diagonal) {
      x(i) = b(i) / diag;
    } else {
      if (count == 0) throw LinearSolveError("linear_solve: empty row " + std::to_string(i));
      reduced[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(kept.size());
      kept.push_back(i);
    }
  }

  if (!kept.empty()) {
    const auto m = static_cast<Eigen::Index>(kept.size());
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rb(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const Eigen::Index i = kept[static_cast<std::size_t>(r)];
      double v = b(i);
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(a, i); it; ++it) {
        const Eigen::Index c = reduced[static_cast<std::size_t>(it.col())];
        if (c >= 0) {
          trip.emplace_back(r, c, it.value());
        } else {
          v -= it.value() * x(it.col());
        }
      }
      rb(r) = v;
    }
    ColMatrix ar(m, m);
    ar.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(ar);
    lu.factorize(ar);
    if (lu.info() != Eigen::Success) {
      throw LinearSolveError("linear_solve: sparse LU failed (" + lu.lastErrorMessage() + ")");
    }
    Eigen::VectorXd xr = lu.solve(rb);
    // A couple of refinement sweeps absorb the factorization round-off.
    for (int sweep = 0; sweep < 3; ++sweep) {
      const Eigen::VectorXd res = rb - ar * xr;
      const double nrb = rb.norm();
      if (!(nrb > 0.0) || res.norm() <= 0.1 * linear_tol * nrb) break;
      xr += lu.solve(res);
    }
    for (Eigen::Index r = 0; r < m; ++r) x(kept[static_cast<std::size_t>(r)]) = xr(r);
  }

  const double rel = relative_residual(a, x, b);
  if (stats) {
    stats->relative_residual = rel;
    stats->eliminated_rows = static_cast<std::size_t>(n) - kept.size();
    stats->factored_rows = kept.size();
  }
  if (!std::isfinite(rel) || rel > linear_tol) {
    std::ostringstream msg;
    msg << "linear_solve: relative residual " << rel << " exceeds tolerance " << linear_tol;
    throw LinearSolveError(msg.str());
  }
  return {x.data(), x.data() + n};
}

std::vector<double> linear_solve(const SparseSystem& system, std::span<const double> rhs, double linear_tol,
                                 LinearSolveStats* stats) {
  return linear_solve(system.jacobian, rhs, linear_tol, stats);
}

Field default_seed(const Grid& grid) {
  return Field::sample(grid, [](const Eigen::Vector3d& p) { return p.squaredNorm(); });
}

SolveResult solve(const Grid& grid, const ScalarFunction& rho, const ScalarFunction& sigma, const OperatorConfig& cfg,
                  const NewtonConfig& ncfg, std::optional<Field> seed) {
  if (!(ncfg.tol_residual > 0.0) || ncfg.max_iters <= 0 || ncfg.max_halvings <= 0 || !(ncfg.linear_tol > 0.0)) {
    throw std::invalid_argument("Newton configuration entries must be positive");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> target = make_target(grid, rho, sigma);

  SolveResult out{seed ? std::move(*seed) : default_seed(grid), {}};
  if (&out.u.grid() != &grid) throw std::invalid_argument("seed lives on a different grid");
  Field& u = out.u;
  SolveReport& rep = out.report;

  // Raises NotAdmissibleError for a seed outside U0.
  SparseSystem sys = assemble_system(u, target, cfg);
  double norm = sup_norm(sys.residual);
  rep.residual_history.push_back(norm);

  for (int iter = 0;; ++iter) {
    if (norm <= ncfg.tol_residual) {
      rep.converged = true;
      break;
    }
    if (iter == ncfg.max_iters) {
      rep.failure = "maximum number of Newton iterations reached";
      break;
    }
    std::vector<double> rhs(sys.residual.size());
    std::transform(sys.residual.begin(), sys.residual.end(), rhs.begin(), [](double r) { return -r; });
    LinearSolveStats stats;
    const std::vector<double> dir = linear_solve(sys, rhs, ncfg.linear_tol, &stats);

    bool accepted = false;
    double delta = 1.0;
    Field candidate = u;
    for (int k = 0; k <= ncfg.max_halvings; ++k, delta *= 0.5) {
      for (std::size_t i = 0; i < u.size(); ++i) candidate[i] = u[i] + delta * dir[i];
      const auto r = try_residual(candidate, target, cfg);
      if (r && sup_norm(*r) <= (1.0 - 0.5 * delta) * norm) {
        accepted = true;
        norm = sup_norm(*r);
        break;
      }
    }
    if (!accepted) {
      rep.failure = "line search exceeded the maximum number of halvings";
      break;
    }
    u = std::move(candidate);
    rep.iterations = iter + 1;
    rep.residual_history.push_back(norm);
    rep.damping_history.push_back(delta);
    rep.linear_solve_stats.push_back(stats);
    if (ncfg.verbose) {
      std::cerr << "newton " << cfg.label() << " iter " << rep.iterations << " delta " << delta << " residual "
                << norm << " linear " << stats.relative_residual << '\n';
    }
    if (norm > ncfg.tol_residual) sys = assemble_system(u, target, cfg);
  }

  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

bool sanity_bounds(const Field& u, const ScalarFunction& rho, const ScalarFunction& sigma) {
  const Grid& g = u.grid();
  double sigma_min = INFINITY;
  double sigma_max = -INFINITY;
  for (std::size_t i = g.interior_count(); i < g.size(); ++i) {
    const double s = sigma(g.physical_point(i));
    sigma_min = std::min(sigma_min, s);
    sigma_max = std::max(sigma_max, s);
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < g.interior_count(); ++i) mass += rho(g.physical_point(i));
  const double n3 = std::pow(static_cast<double>(g.n()), 3);
  const double omega3 = 4.0 * std::numbers::pi / 3.0;
  const double lower = sigma_min - std::cbrt(mass / n3 / omega3) * g.domain().diameter();
  const double upper = sigma_max;
  const double slack_lo = 1e-10 * std::max(1.0, std::abs(lower));
  const double slack_hi = 1e-10 * std::max(1.0, std::abs(upper));
  for (double v : u.values()) {
    if (!(v >= lower - slack_lo && v <= upper + slack_hi)) return false;
  }
  return true;
}

}  // namespace ma3d
