#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvxkit/geometry.hpp"
#include "cvxkit/kernels.hpp"
#include "cvxkit/problem_io.hpp"

namespace cvxkit {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Vec parse_csv_vector(const std::string& text) {
  Vec v;
  std::istringstream fields(text);
  std::string field;
  while (std::getline(fields, field, ',')) {
    try {
      v.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw ParseError("bad coordinate \"" + field + "\" in --start");
    }
  }
  if (v.empty()) throw ParseError("--start needs at least one coordinate");
  return v;
}

std::string join(std::span<const double> v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_number(v[i]);
  }
  return out;
}

// Minimum-norm equality-feasible point, or the projection of `seed` onto
// the equality manifold when a seed is supplied.
Vec eq_feasible_point(const ConvexProblem& prob, const std::optional<Vec>& seed) {
  const std::size_t n = prob.dimension();
  const DenseMatrix& a = prob.eq_matrix();
  const std::size_t p = a.rows();
  Vec x = seed ? *seed : Vec(n, 0.0);
  if (p == 0) return x;
  DenseMatrix gram(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) gram(i, j) = kernels::dot(a.row(i), a.row(j));
  }
  Vec r = matvec(a, x);
  for (std::size_t i = 0; i < p; ++i) r[i] -= prob.eq_rhs()[i];
  const Vec w = lu_solve(std::move(gram), std::move(r));
  const Vec atw = matvec_transposed(a, w);
  for (std::size_t i = 0; i < n; ++i) x[i] -= atw[i];
  return x;
}

struct SolveFlags {
  std::string problem_path;
  double eps = 1e-6;
  double t0 = 10.0;
  double mu = 10.0;
  std::size_t max_newton = 200;
  std::string start_csv;
  std::string trace_path;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--problem", f.problem_path, "problem file (JSON)")->required();
  cmd->add_option("--eps", f.eps, "target gap");
  cmd->add_option("--t0", f.t0, "initial barrier parameter");
  cmd->add_option("--mu", f.mu, "barrier update factor");
  cmd->add_option("--max-newton", f.max_newton, "Newton iteration cap per centering");
  cmd->add_option("--start", f.start_csv, "start point, comma-separated");
  cmd->add_option("--trace", f.trace_path, "trace CSV output path");
}

void emit_trace(const std::string& path, const std::vector<TraceRow>& rows) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open trace output \"" + path + "\"");
  write_trace(rows, out);
  out.flush();
  if (!out) throw Error("trace write to \"" + path + "\" failed");
}

void print_report(const SolveReport& rep) {
  std::cout << "status " << to_string(rep.status) << '\n'
            << "outer " << rep.total_centerings << '\n'
            << "newton " << rep.total_newton << '\n';
  if (!rep.x.empty()) {
    std::cout << "f0 " << format_number(rep.outer.empty() ? 0.0 : rep.outer.back().objective)
              << '\n'
              << "gap_bound " << format_number(rep.dual.gap_bound) << '\n'
              << "x " << join(rep.x) << '\n';
  }
}

// Returns a strictly feasible start, running the feasibility phase when
// the provided start (if any) is not already strictly feasible. A false
// second member means the problem was certified infeasible.
std::pair<Vec, bool> ensure_strictly_feasible(const ConvexProblem& prob,
                                              const std::optional<Vec>& start,
                                              const BarrierConfig& cfg) {
  if (start && start->size() != prob.dimension()) {
    throw ValidationError("start point has wrong dimension");
  }
  if (start && prob.strictly_feasible(*start) && prob.satisfies_equalities(*start)) {
    return {*start, true};
  }
  Vec x0 = eq_feasible_point(prob, start);
  PhaseOneResult pr = phase1(prob, x0, cfg);
  if (!pr.feasible) {
    std::cerr << "infeasible: certified phase-I lower bound "
              << format_number(pr.pbar_star_lower) << '\n';
    return {{}, false};
  }
  return {std::move(pr.x), true};
}

int run_solve(const SolveFlags& f, bool preliminary) {
  const ProblemFile pf = parse_problem_file(read_file(f.problem_path));
  const ConvexProblem prob = build_problem(pf);

  std::optional<Vec> start = pf.start;
  if (!f.start_csv.empty()) start = parse_csv_vector(f.start_csv);

  BarrierConfig cfg;
  cfg.t0 = f.t0;
  cfg.u = f.mu;
  cfg.eps = f.eps;
  cfg.inner.max_iter = f.max_newton;

  auto [x0, feasible] = ensure_strictly_feasible(prob, start, cfg);
  if (!feasible) return 1;

  std::vector<TraceRow> rows;
  std::vector<TraceRow>* trace = f.trace_path.empty() ? nullptr : &rows;
  const SolveReport rep = preliminary ? solve_preliminary(prob, x0, f.eps, cfg.inner, trace)
                                      : solve_barrier(prob, x0, cfg, trace);
  emit_trace(f.trace_path, rows);
  print_report(rep);
  if (rep.status != SolveStatus::Optimal) {
    std::cerr << "solver failure: " << to_string(rep.status) << '\n';
    return 2;
  }
  return 0;
}

int run_phase1(const SolveFlags& f) {
  const ProblemFile pf = parse_problem_file(read_file(f.problem_path));
  const ConvexProblem prob = build_problem(pf);
  std::optional<Vec> start = pf.start;
  if (!f.start_csv.empty()) start = parse_csv_vector(f.start_csv);
  if (start && start->size() != prob.dimension()) {
    throw ValidationError("start point has wrong dimension");
  }

  BarrierConfig cfg;
  cfg.t0 = f.t0;
  cfg.u = f.mu;
  cfg.eps = f.eps;
  cfg.inner.max_iter = f.max_newton;

  const Vec x0 = eq_feasible_point(prob, start);
  const PhaseOneResult pr = phase1(prob, x0, cfg);
  if (!pr.feasible) {
    std::cerr << "infeasible: certified phase-I lower bound "
              << format_number(pr.pbar_star_lower) << '\n';
    return 1;
  }
  std::cout << "status feasible\n"
            << "x " << join(pr.x) << '\n';
  return 0;
}

int run_chebyshev(const std::string& points_path) {
  const auto points = parse_point_list(read_file(points_path));
  if (points.empty()) throw ValidationError("chebyshev: point file is empty");
  const ChebyshevResult res = chebyshev_center(points);
  std::cout << "center " << join(res.center) << '\n'
            << "radius " << format_number(res.radius) << '\n';
  return 0;
}

int run_voronoi(const std::string& points_path) {
  const auto points = parse_point_list(read_file(points_path));
  if (points.size() < 2) {
    throw ValidationError("voronoi: need the base point plus at least one rival");
  }
  const Vec x0 = points.front();
  const std::vector<Vec> others(points.begin() + 1, points.end());
  const Polyhedron cell = voronoi_polyhedron(x0, others);
  for (std::size_t i = 0; i < cell.g.rows(); ++i) {
    std::cout << join(cell.g.row(i)) << ',' << format_number(cell.h[i]) << '\n';
  }
  return 0;
}

int run_separate(const std::string& points_path, const std::string& points2_path) {
  const auto c_points = parse_point_list(read_file(points_path));
  const auto d_points = parse_point_list(read_file(points2_path));
  const Hyperplane hp = separating_hyperplane(c_points, d_points);
  std::cout << "a " << join(hp.a) << '\n'
            << "b " << format_number(hp.b) << '\n';
  return 0;
}

int run_check(const std::string& problem_path, std::uint64_t seed) {
  const ProblemFile pf = parse_problem_file(read_file(problem_path));
  const ConvexProblem prob = build_problem(pf);
  const std::size_t n = prob.dimension();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 10.0);
  const PointSampler sampler = [&]() {
    Vec x(n);
    for (double& e : x) e = gauss(rng);
    return x;
  };

  std::vector<FieldPtr> fields;
  fields.push_back(prob.objective_ptr());
  for (const auto& f : prob.inequalities()) fields.push_back(f);

  double grad_err = 0.0;
  double hess_err = 0.0;
  std::size_t first_order = 0;
  std::size_t not_psd = 0;
  for (const auto& f : fields) {
    for (int probe = 0; probe < 100; ++probe) {
      const Vec x = sampler();
      const DerivativeReport dr = check_derivatives(*f, x, default_fd_step(x));
      grad_err = std::max(grad_err, dr.max_gradient_error);
      hess_err = std::max(hess_err, dr.max_hessian_error);
    }
    const ConvexityReport cr = check_convexity_sampled(*f, sampler, 100);
    for (const auto& v : cr.violations) {
      (v.kind == ViolationKind::FirstOrder ? first_order : not_psd) += 1;
    }
  }

  std::cout << "max_gradient_error " << format_number(grad_err) << '\n'
            << "max_hessian_error " << format_number(hess_err) << '\n'
            << "first_order_violations " << first_order << '\n'
            << "hessian_violations " << not_psd << '\n';
  const bool clean = grad_err <= 1e-5 && hess_err <= 1e-5 && first_order == 0 && not_psd == 0;
  if (!clean) std::cerr << "check: derivative or convexity diagnostics failed\n";
  return clean ? 0 : 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"convex solver and geometry toolkit"};
  app.require_subcommand(1);

  SolveFlags solve_flags;
  SolveFlags prelim_flags;
  SolveFlags phase1_flags;
  std::string points_path;
  std::string points2_path;
  std::string check_problem;
  std::uint64_t seed = 0;

  CLI::App* solve_cmd = app.add_subcommand("solve", "phase I (if needed) plus the barrier method");
  add_solve_flags(solve_cmd, solve_flags);

  CLI::App* prelim_cmd = app.add_subcommand("preliminary", "single centering at t = m/eps");
  add_solve_flags(prelim_cmd, prelim_flags);

  CLI::App* phase1_cmd = app.add_subcommand("phase1", "find a strictly feasible point");
  add_solve_flags(phase1_cmd, phase1_flags);

  CLI::App* cheb_cmd = app.add_subcommand("chebyshev", "smallest enclosing ball of a point list");
  cheb_cmd->add_option("--points", points_path, "point list file")->required();

  CLI::App* vor_cmd =
      app.add_subcommand("voronoi", "halfspace form of the cell around the first point");
  vor_cmd->add_option("--points", points_path, "point list file; first line is the base point")
      ->required();

  CLI::App* sep_cmd = app.add_subcommand("separate", "separating hyperplane between two hulls");
  sep_cmd->add_option("--points", points_path, "first point set")->required();
  sep_cmd->add_option("--points2", points2_path, "second point set")->required();

  CLI::App* check_cmd =
      app.add_subcommand("check", "derivative and sampled-convexity diagnostics");
  check_cmd->add_option("--problem", check_problem, "problem file (JSON)")->required();
  check_cmd->add_option("--seed", seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(solve_flags, false);
    if (prelim_cmd->parsed()) return run_solve(prelim_flags, true);
    if (phase1_cmd->parsed()) return run_phase1(phase1_flags);
    if (cheb_cmd->parsed()) return run_chebyshev(points_path);
    if (vor_cmd->parsed()) return run_voronoi(points_path);
    if (sep_cmd->parsed()) return run_separate(points_path, points2_path);
    if (check_cmd->parsed()) return run_check(check_problem, seed);
  } catch (const NotSeparableError& e) {
    std::cerr << "not separable: " << e.what() << '\n';
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const UnknownNameError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const BadParamsError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const DegeneratePointError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const OutOfDomainError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const NotStrictlyFeasibleError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const InfeasibleStartError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 2;
  }
  return 3;
}

}  // namespace cvxkit
