#include "ma3d_tools/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ma3d/bench.hpp"
#include "ma3d/grid.hpp"
#include "ma3d/newton.hpp"
#include "ma3d/operators.hpp"
#include "ma3d/stencil.hpp"
#include "ma3d/voronoi.hpp"

namespace ma3d::tools {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitBadArgs = 2;

class OutputFile {
 public:
  explicit OutputFile(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw std::invalid_argument("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

struct CaseOptions {
  std::string name = "quadratic";
  std::vector<double> matrix;
  std::uint64_t seed = 1;
  double kappa = 8.5;
};

TestCase build_case(const std::string& name, const CaseOptions& opt) {
  TestCaseParams params;
  params.seed = opt.seed;
  params.kappa = opt.kappa;
  if (!opt.matrix.empty()) params.matrix = SymMatrix::from_upper(opt.matrix, 3);
  return make_test_case(name, params);
}

OperatorConfig build_scheme(const std::string& scheme, const std::string& stencil, const std::string& stencil_file) {
  if (!stencil_file.empty()) {
    if (scheme != "proposed") throw std::invalid_argument("--stencil-file requires --scheme proposed");
    std::ifstream in(stencil_file);
    if (!in) throw std::invalid_argument("cannot open stencil file '" + stencil_file + "'");
    return OperatorConfig::proposed(read_stencil(in));
  }
  return parse_scheme(stencil.empty() ? scheme : scheme + ":" + stencil);
}

nlohmann::json report_json(const TestCase& tc, const OperatorConfig& scheme, const Grid& grid,
                           const NewtonConfig& ncfg, const SolveResult& res) {
  nlohmann::json lin = nlohmann::json::array();
  for (const auto& s : res.report.linear_solve_stats) {
    lin.push_back({{"relative_residual", s.relative_residual},
                   {"eliminated_rows", s.eliminated_rows},
                   {"factored_rows", s.factored_rows}});
  }
  nlohmann::json j;
  j["case"] = tc.name;
  j["scheme"] = scheme.label();
  j["n"] = grid.n();
  j["interior_points"] = grid.interior_count();
  j["boundary_points"] = grid.boundary_count();
  j["converged"] = res.report.converged;
  j["iterations"] = res.report.iterations;
  j["residual_history"] = res.report.residual_history;
  j["damping_history"] = res.report.damping_history;
  j["linear_solves"] = std::move(lin);
  j["wall_time"] = res.report.wall_time;
  j["linf_error"] = linf_error(res.u, tc);
  j["failure"] = res.report.failure;
  j["config"] = {{"tol_residual", ncfg.tol_residual},
                 {"max_iters", ncfg.max_iters},
                 {"max_halvings", ncfg.max_halvings},
                 {"linear_tol", ncfg.linear_tol}};
  return j;
}

int run_solve(const CaseOptions& copt, const std::string& scheme_name, const std::string& stencil,
              const std::string& stencil_file, int n, const NewtonConfig& ncfg, const std::string& dump,
              const std::string& report) {
  const TestCase tc = build_case(copt.name, copt);
  const OperatorConfig scheme = build_scheme(scheme_name, stencil, stencil_file);
  const Grid grid = build_grid(Domain::unit_cube(), n, scheme.stencil());
  std::optional<SolveResult> solved;
  try {
    solved.emplace(solve(grid, tc.density, tc.boundary, scheme, ncfg));
  } catch (const NotAdmissibleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const LinearSolveError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotConverged;
  }
  const SolveResult& res = *solved;
  std::cout << std::setprecision(6) << "case " << tc.name << "  scheme " << scheme.label() << "  n " << n
            << "\niterations " << res.report.iterations << "  converged " << (res.report.converged ? "yes" : "no")
            << "  residual " << res.report.residual_history.back() << "\nlinf_error " << linf_error(res.u, tc)
            << "  seconds " << res.report.wall_time << '\n';
  if (!res.report.converged) std::cerr << "not converged: " << res.report.failure << '\n';
  if (!dump.empty()) {
    OutputFile out(dump);
    write_field_csv(out.stream(), res.u);
  }
  if (!report.empty()) {
    OutputFile out(report);
    out.stream() << report_json(tc, scheme, grid, ncfg, res).dump(2) << '\n';
  }
  return res.report.converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"3D Monge-Ampere discretizations: solver, tables, consistency maps, stencils"};
  app.require_subcommand(1);

  // solve
  CaseOptions solve_case;
  std::string solve_scheme = "proposed";
  std::string solve_stencil;
  std::string solve_stencil_file;
  int solve_n = 16;
  NewtonConfig solve_cfg;
  std::string solve_dump;
  std::string solve_report;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one test case with damped Newton");
  solve_cmd->add_option("--case", solve_case.name, "quadratic, cone or singular")
      ->check(CLI::IsMember({"quadratic", "cone", "smoothed_cone", "singular"}))
      ->capture_default_str();
  solve_cmd->add_option("--scheme", solve_scheme, "proposed, fd, ws, or a full label like proposed:large")
      ->capture_default_str();
  solve_cmd->add_option("--stencil", solve_stencil, "small, large, kappa:<k> (proposed); small, medium, large (ws)");
  solve_cmd->add_option("--stencil-file", solve_stencil_file, "Stencil file for the proposed scheme")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--n", solve_n, "Resolution")->check(CLI::Range(2, 400))->capture_default_str();
  solve_cmd->add_option("--tol", solve_cfg.tol_residual, "Sup-norm residual tolerance")->capture_default_str();
  solve_cmd->add_option("--max-iters", solve_cfg.max_iters, "Newton iteration limit")->capture_default_str();
  solve_cmd->add_option("--dump", solve_dump, "Write the solution as CSV");
  solve_cmd->add_option("--report-json", solve_report, "Write the solve report as JSON");
  solve_cmd->add_option("--seed", solve_case.seed, "Seed for the random quadratic matrix")->capture_default_str();
  solve_cmd->add_option("--kappa", solve_case.kappa, "Condition number of the random quadratic matrix")
      ->capture_default_str();
  solve_cmd->add_option("--matrix", solve_case.matrix, "Quadratic matrix, 6 upper-triangle entries")->expected(6);
  solve_cmd->add_flag("--verbose,-v", solve_cfg.verbose, "Newton progress on stderr");

  // table
  std::vector<std::string> table_cases{"quadratic", "cone", "singular"};
  std::vector<std::string> table_schemes{"proposed:small", "proposed:large", "fd", "ws:small"};
  std::vector<int> table_ns{8, 12, 16, 20};
  std::string table_out;
  bool table_full = false;
  CaseOptions table_case;
  NewtonConfig table_cfg;
  auto* table_cmd = app.add_subcommand("table", "Convergence table over schemes and resolutions (CSV)");
  table_cmd->add_option("--cases", table_cases, "Comma separated test cases")->delimiter(',')->capture_default_str();
  table_cmd->add_option("--schemes", table_schemes, "Comma separated scheme labels")
      ->delimiter(',')
      ->capture_default_str();
  auto* n_list_opt = table_cmd->add_option("--n-list", table_ns, "Comma separated resolutions")
                         ->delimiter(',')
                         ->check(CLI::Range(2, 400))
                         ->capture_default_str();
  table_cmd->add_flag("--full-scale", table_full, "Resolutions 10,20,30,40,50 (minutes per run)")
      ->excludes(n_list_opt);
  table_cmd->add_option("--out", table_out, "CSV path, stdout by default");
  table_cmd->add_option("--seed", table_case.seed, "Seed for the random quadratic matrix")->capture_default_str();
  table_cmd->add_option("--kappa", table_case.kappa, "Condition number of the random quadratic matrix")
      ->capture_default_str();
  table_cmd->add_option("--tol", table_cfg.tol_residual, "Sup-norm residual tolerance")->capture_default_str();

  // sphere
  std::string sphere_family = "aniso_plus";
  std::string sphere_scheme = "proposed:small";
  std::size_t sphere_samples = 1000;
  std::string sphere_out;
  auto* sphere_cmd = app.add_subcommand("sphere", "Consistency error over the unit sphere (CSV)");
  sphere_cmd->add_option("--family", sphere_family, "aniso_plus, aniso_minus or rotated")
      ->check(CLI::IsMember({"aniso_plus", "aniso_minus", "rotated"}))
      ->capture_default_str();
  sphere_cmd->add_option("--scheme", sphere_scheme, "proposed:<stencil> or ws:<set>")->capture_default_str();
  sphere_cmd->add_option("--samples", sphere_samples, "Fibonacci sphere size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sphere_cmd->add_option("--out", sphere_out, "CSV path, stdout by default");

  // voronoi
  std::vector<double> voronoi_matrix;
  std::string voronoi_off;
  auto* voronoi_cmd = app.add_subcommand("voronoi", "Strict Voronoi vectors and cell volume of a 3x3 SPD matrix");
  voronoi_cmd->add_option("--matrix", voronoi_matrix, "m11 m12 m13 m22 m23 m33")->expected(6)->required();
  voronoi_cmd->add_option("--off", voronoi_off, "Write the Voronoi cell as an OFF file");

  // stencil
  std::string stencil_which;
  double stencil_kappa = 0.0;
  std::string stencil_ws;
  std::string stencil_out;
  auto* stencil_cmd = app.add_subcommand("stencil", "Print a stencil or a triplet set");
  auto* which_opt = stencil_cmd->add_option("--which", stencil_which, "small or large")
                        ->check(CLI::IsMember({"small", "large"}));
  auto* kappa_opt = stencil_cmd->add_option("--kappa", stencil_kappa, "kappa stencil, kappa >= 1")
                        ->check(CLI::Range(1.0, 1000.0));
  auto* ws_opt = stencil_cmd->add_option("--ws", stencil_ws, "Triplet set: small, medium or large")
                     ->check(CLI::IsMember({"small", "medium", "large"}));
  which_opt->excludes(kappa_opt)->excludes(ws_opt);
  kappa_opt->excludes(ws_opt);
  stencil_cmd->add_option("--out", stencil_out, "Write the stencil file here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitBadArgs;
  }

  try {
    if (*solve_cmd) {
      return run_solve(solve_case, solve_scheme, solve_stencil, solve_stencil_file, solve_n, solve_cfg, solve_dump,
                       solve_report);
    }

    if (*table_cmd) {
      if (table_full) table_ns = {10, 20, 30, 40, 50};
      std::vector<OperatorConfig> schemes;
      for (const auto& s : table_schemes) schemes.push_back(parse_scheme(s));
      std::vector<RunRecord> records;
      for (const auto& name : table_cases) {
        const TestCase tc = build_case(name, table_case);
        for (auto& r : convergence_table(tc, schemes, table_ns, table_cfg)) records.push_back(std::move(r));
      }
      OutputFile out(table_out);
      write_table_csv(out.stream(), records);
      return kExitOk;
    }

    if (*sphere_cmd) {
      const auto samples =
          consistency_sphere_map(parse_sphere_family(sphere_family), parse_scheme(sphere_scheme), sphere_samples);
      OutputFile out(sphere_out);
      write_sphere_csv(out.stream(), samples);
      return kExitOk;
    }

    if (*voronoi_cmd) {
      const SymMatrix m = SymMatrix::from_upper(voronoi_matrix, 3);
      if (!m.is_positive_definite()) throw std::invalid_argument("matrix is not positive definite");
      const VoronoiCell cell = voronoi_cell(m);
      std::cout << "strict voronoi vectors: " << cell.strict_vectors.size() << " pairs\n";
      for (std::size_t k = 0; k < cell.strict_vectors.size(); ++k) {
        std::cout << "  +-" << cell.strict_vectors[k] << "  facet area " << cell.facet_areas[k] << '\n';
      }
      std::cout << std::setprecision(12) << "volume " << cell.volume << '\n';
      if (!voronoi_off.empty()) {
        OutputFile out(voronoi_off);
        cell.polytope.write_off(out.stream());
      }
      return kExitOk;
    }

    if (*stencil_cmd) {
      if (!stencil_ws.empty()) {
        const int r = stencil_ws == "small" ? 1 : stencil_ws == "medium" ? 2 : 3;
        const OrthogonalTripletSet set = make_ws_triplets(r);
        std::cout << "triplets " << set.size() << '\n';
        for (const auto& t : set.triplets()) std::cout << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
        if (!stencil_out.empty()) {
          OutputFile out(stencil_out);
          write_stencil(out.stream(), set.stencil());
        }
        return kExitOk;
      }
      const Stencil st = stencil_kappa > 0.0 ? make_kappa_stencil(stencil_kappa, 3)
                                             : make_table1_stencil(stencil_which == "large" ? Table1Stencil::large
                                                                                            : Table1Stencil::small);
      std::cout << "stencil " << st.label() << "\ndirections " << st.size() << '\n';
      for (const auto& e : st.directions()) std::cout << e << '\n';
      if (!stencil_out.empty()) {
        OutputFile out(stencil_out);
        write_stencil(out.stream(), st);
      }
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadArgs;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotConverged;
  }
  return kExitBadArgs;
}

}  // namespace ma3d::tools
