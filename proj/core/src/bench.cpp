#include "ma3d/bench.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/QR>

namespace ma3d {

TestCase make_quadratic_case(const SymMatrix& m) {
  if (m.dim() != 3 || !m.is_positive_definite()) {
    throw std::invalid_argument("quadratic test case needs a 3x3 positive definite matrix");
  }
  const Eigen::Matrix3d md = m.dense3();
  const double det = md.determinant();
  TestCase tc;
  tc.name = "quadratic";
  tc.kind = TestCaseKind::quadratic;
  tc.exact = [md](const Eigen::Vector3d& x) { return 0.5 * x.dot(md * x); };
  tc.density = [det](const Eigen::Vector3d&) { return det; };
  tc.boundary = tc.exact;
  tc.matrix = m;
  return tc;
}

TestCase make_smoothed_cone_case(double delta, const Eigen::Vector3d& apex) {
  if (!(delta > 0.0)) throw std::invalid_argument("smoothed cone needs delta > 0");
  TestCase tc;
  tc.name = "cone";
  tc.kind = TestCaseKind::smoothed_cone;
  const double d2 = delta * delta;
  tc.exact = [d2, apex](const Eigen::Vector3d& x) { return std::sqrt(d2 + (x - apex).squaredNorm()); };
  // U = f(r), det = f'' (f'/r)^2 = d^2 (d^2 + r^2)^(-5/2)
  tc.density = [d2, apex](const Eigen::Vector3d& x) { return d2 / std::pow(d2 + (x - apex).squaredNorm(), 2.5); };
  tc.boundary = tc.exact;
  return tc;
}

TestCase make_singular_case() {
  TestCase tc;
  tc.name = "singular";
  tc.kind = TestCaseKind::singular;
  tc.exact = [](const Eigen::Vector3d& x) { return -std::sqrt(3.0 - x.squaredNorm()); };
  tc.density = [](const Eigen::Vector3d& x) { return 3.0 / std::pow(3.0 - x.squaredNorm(), 2.5); };
  tc.boundary = tc.exact;
  return tc;
}

TestCase make_test_case(std::string_view name, const TestCaseParams& params) {
  if (name == "quadratic") {
    if (params.matrix) return make_quadratic_case(*params.matrix);
    std::mt19937_64 rng(params.seed);
    return make_quadratic_case(random_spd_with_kappa(rng, params.kappa));
  }
  if (name == "cone" || name == "smoothed_cone") return make_smoothed_cone_case(params.delta, params.apex);
  if (name == "singular") return make_singular_case();
  throw std::invalid_argument("unknown test case '" + std::string(name) + "'");
}

double linf_error(const Field& u, const TestCase& tc) {
  const Grid& g = u.grid();
  double err = 0.0;
  for (std::size_t i = 0; i < g.interior_count(); ++i) {
    err = std::max(err, std::abs(u[i] - tc.exact(g.physical_point(i))));
  }
  return err;
}

namespace {

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) a(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
  return qr.householderQ();
}

SymMatrix from_spectrum(const Eigen::Matrix3d& q, const Eigen::Vector3d& lambda) {
  return SymMatrix::from_dense(q * lambda.asDiagonal() * q.transpose());
}

}  // namespace

SymMatrix random_spd(std::mt19937_64& rng, double kappa_max) {
  if (!(kappa_max >= 1.0)) throw std::invalid_argument("kappa_max must be >= 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Matrix3d q = random_rotation(rng);
  const double log_span = 2.0 * std::log(kappa_max);
  Eigen::Vector3d lambda;
  for (int i = 0; i < 3; ++i) lambda(i) = std::exp(log_span * unit(rng));
  return from_spectrum(q, lambda);
}

SymMatrix random_spd_with_kappa(std::mt19937_64& rng, double kappa) {
  if (!(kappa >= 1.0)) throw std::invalid_argument("kappa must be >= 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Matrix3d q = random_rotation(rng);
  const double top = kappa * kappa;
  const Eigen::Vector3d lambda(1.0, top, std::exp(std::log(top) * unit(rng)));
  return from_spectrum(q, lambda);
}

OperatorConfig parse_scheme(std::string_view label) {
  const auto colon = label.find(':');
  const std::string_view kind = label.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : label.substr(colon + 1);
  if (kind == "fd") {
    if (!arg.empty()) throw std::invalid_argument("scheme fd takes no stencil");
    return OperatorConfig::fd();
  }
  if (kind == "proposed") {
    if (arg.empty() || arg == "small") return OperatorConfig::proposed(make_table1_stencil(Table1Stencil::small));
    if (arg == "large") return OperatorConfig::proposed(make_table1_stencil(Table1Stencil::large));
    if (arg.rfind("kappa:", 0) == 0) {
      const std::string value(arg.substr(6));
      std::size_t used = 0;
      const double kappa = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("bad kappa value '" + value + "'");
      return OperatorConfig::proposed(make_kappa_stencil(kappa, 3));
    }
  }
  if (kind == "ws") {
    if (arg.empty() || arg == "small") return OperatorConfig::ws(make_ws_triplets(1));
    if (arg == "medium") return OperatorConfig::ws(make_ws_triplets(2));
    if (arg == "large") return OperatorConfig::ws(make_ws_triplets(3));
  }
  throw std::invalid_argument("unknown scheme '" + std::string(label) + "'");
}

SphereFamily parse_sphere_family(std::string_view name) {
  if (name == "aniso_plus") return SphereFamily::aniso_plus;
  if (name == "aniso_minus") return SphereFamily::aniso_minus;
  if (name == "rotated") return SphereFamily::rotated;
  throw std::invalid_argument("unknown sphere family '" + std::string(name) + "'");
}

SymMatrix sphere_family_matrix(SphereFamily family, const Eigen::Vector3d& v) {
  const Eigen::Vector3d u = v.normalized();
  const Eigen::Matrix3d vvt = u * u.transpose();
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  switch (family) {
    case SphereFamily::aniso_plus:
      return SymMatrix::from_dense(id + (36.0 - 1.0) * vvt);
    case SphereFamily::aniso_minus:
      return SymMatrix::from_dense(id + (1.0 / 36.0 - 1.0) * vvt);
    case SphereFamily::rotated: {
      const Eigen::Matrix3d r = 2.0 * vvt - id;  // half-turn about v
      const Eigen::Vector3d d(6.0, 1.0, 1.0 / 6.0);
      return SymMatrix::from_dense(r * d.asDiagonal() * r);
    }
  }
  throw std::logic_error("unhandled sphere family");
}

std::vector<Eigen::Vector3d> fibonacci_sphere(std::size_t count) {
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(i);
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

std::vector<SphereSample> consistency_sphere_map(SphereFamily family, const OperatorConfig& scheme,
                                                 std::size_t samples) {
  if (scheme.kind() == SchemeKind::fd) throw std::invalid_argument("sphere maps cover the proposed and ws schemes");
  const int n = 8;
  const Grid grid = build_grid(Domain::unit_cube(), n, scheme.stencil());
  const std::size_t centre = grid.interior_index({n / 2, n / 2, n / 2});
  std::vector<SphereSample> out;
  out.reserve(samples);
  for (const auto& v : fibonacci_sphere(samples)) {
    const SymMatrix m = sphere_family_matrix(family, v);
    const Eigen::Matrix3d md = m.dense3();
    const Field u = Field::sample(grid, [&md](const Eigen::Vector3d& x) { return 0.5 * x.dot(md * x); });
    const double value = evaluate(u, centre, scheme);
    out.push_back({v, (value - m.det()) / value});
  }
  return out;
}

void write_sphere_csv(std::ostream& os, const std::vector<SphereSample>& samples) {
  os << "vx,vy,vz,rel_error\n" << std::setprecision(12);
  for (const auto& s : samples) {
    os << s.v.x() << ',' << s.v.y() << ',' << s.v.z() << ',' << s.relative_error << '\n';
  }
}

RunRecord run_case(const TestCase& tc, const OperatorConfig& scheme, int n, const NewtonConfig& ncfg) {
  RunRecord rec;
  rec.case_name = tc.name;
  switch (scheme.kind()) {
    case SchemeKind::proposed:
      rec.scheme = "proposed";
      rec.stencil = scheme.stencil().label();
      break;
    case SchemeKind::fd:
      rec.scheme = "fd";
      rec.stencil = "-";
      break;
    case SchemeKind::ws:
      rec.scheme = "ws";
      rec.stencil = scheme.triplets()->label();
      break;
  }
  rec.n = n;
  rec.linf_error = std::numeric_limits<double>::quiet_NaN();
  const auto start = std::chrono::steady_clock::now();
  try {
    const Grid grid = build_grid(Domain::unit_cube(), n, scheme.stencil());
    const SolveResult res = solve(grid, tc.density, tc.boundary, scheme, ncfg);
    rec.iters = res.report.iterations;
    rec.converged = res.report.converged;
    rec.linf_error = linf_error(res.u, tc);
  } catch (const std::exception&) {
    rec.converged = false;
  }
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<RunRecord> convergence_table(const TestCase& tc, const std::vector<OperatorConfig>& schemes,
                                         const std::vector<int>& resolutions, const NewtonConfig& ncfg) {
  std::vector<RunRecord> out;
  for (const auto& scheme : schemes) {
    for (int n : resolutions) out.push_back(run_case(tc, scheme, n, ncfg));
  }
  return out;
}

void write_table_csv(std::ostream& os, const std::vector<RunRecord>& records) {
  os << "case,scheme,stencil,n,linf_error,iters,seconds,converged\n";
  for (const auto& r : records) {
    os << r.case_name << ',' << r.scheme << ',' << r.stencil << ',' << r.n << ',' << std::setprecision(10)
       << r.linf_error << ',' << r.iters << ',' << std::setprecision(4) << r.seconds << ','
       << (r.converged ? "true" : "false") << '\n';
  }
}

}  // namespace ma3d
