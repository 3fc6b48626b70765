#include "cvxkit/solver.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cvxkit {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

namespace {

// Residual tolerance the solver declares when recovering dual points at
// its own centers. Centerings finish at Newton-limit accuracy, so this is
// generous; it exists to reject genuinely failed centerings.
constexpr double kCenterTol = 1e-3;

bool centering_succeeded(NewtonStop reason) {
  // A stall means the objective could no longer witness descent, which at
  // large t happens at the center itself; the numerical floor path is the
  // usual exit there.
  return reason == NewtonStop::Converged || reason == NewtonStop::NumericalFloor ||
         reason == NewtonStop::LineSearchStall;
}

void require_solvable_start(const ConvexProblem& prob, const Vec& x0) {
  if (x0.size() != prob.dimension()) {
    throw InfeasibleStartError("solver: start has wrong dimension");
  }
  if (!prob.objective().in_domain(x0)) {
    throw OutOfDomainError("solver: start outside the objective's domain");
  }
  const long violated = prob.first_violated(x0);
  if (violated >= 0) {
    throw NotStrictlyFeasibleError(static_cast<std::size_t>(violated),
                                   "solver: start violates inequality constraint " +
                                       std::to_string(violated));
  }
  if (!prob.satisfies_equalities(x0)) {
    throw InfeasibleStartError("solver: start violates the equality constraints");
  }
}

NewtonResult center_once(const ConvexProblem& prob, double t, Vec x0, const NewtonOptions& inner,
                         std::size_t outer_index, std::vector<TraceRow>* trace,
                         const StepObserver& user_observer) {
  BarrierSubproblem sub(prob, t);
  BarrierObjective obj(std::move(sub));
  const double gap = static_cast<double>(prob.num_inequalities()) / t;
  std::size_t inner_count = 0;
  StepObserver observer;
  if (trace || user_observer) {
    observer = [&](std::span<const double> x, double step) {
      ++inner_count;
      if (trace) {
        trace->push_back(TraceRow{outer_index, t, inner_count, prob.objective().value(x),
                                  barrier_phi(obj.subproblem(), x), step, gap});
      }
      return user_observer ? user_observer(x, step) : true;
    };
  }
  return minimize_eq_newton(obj, prob.eq_matrix(), prob.eq_rhs(), std::move(x0), inner, observer);
}

// Degenerate m = 0 case shared by both solvers: no barrier, one
// equality-constrained Newton solve of f0 itself, gap 0.
SolveReport solve_without_barrier(const ConvexProblem& prob, const Vec& x0, double t_label,
                                  const NewtonOptions& inner, std::vector<TraceRow>* trace,
                                  const StepObserver& user_observer) {
  std::size_t inner_count = 0;
  StepObserver observer;
  if (trace || user_observer) {
    observer = [&](std::span<const double> x, double step) {
      ++inner_count;
      if (trace) {
        trace->push_back(
            TraceRow{1, t_label, inner_count, prob.objective().value(x), 0.0, step, 0.0});
      }
      return user_observer ? user_observer(x, step) : true;
    };
  }
  NewtonResult nr =
      minimize_eq_newton(prob.objective(), prob.eq_matrix(), prob.eq_rhs(), x0, inner, observer);

  SolveReport rep;
  rep.x = std::move(nr.x);
  rep.dual = DualPoint{{}, std::move(nr.vhat), 0.0};
  rep.outer.push_back(
      OuterRecord{t_label, nr.trace.iterations, prob.objective().value(rep.x), 0.0});
  rep.total_centerings = 1;
  rep.total_newton = nr.trace.iterations;
  rep.status = nr.trace.reason == NewtonStop::CallbackStop ? SolveStatus::MaxIterations
               : centering_succeeded(nr.trace.reason)      ? SolveStatus::Optimal
                                                           : SolveStatus::MaxIterations;
  return rep;
}

}  // namespace

SolveReport solve_preliminary(const ConvexProblem& prob, const Vec& x0, double eps,
                              const NewtonOptions& inner, std::vector<TraceRow>* trace) {
  if (!(eps > 0.0)) throw BadParamsError("solve_preliminary: eps must be positive");
  require_solvable_start(prob, x0);

  const std::size_t m = prob.num_inequalities();
  if (m == 0) return solve_without_barrier(prob, x0, 0.0, inner, trace, {});

  const double t = static_cast<double>(m) / eps;
  NewtonResult nr = center_once(prob, t, x0, inner, 1, trace, {});

  SolveReport rep;
  rep.x = nr.x;
  rep.total_centerings = 1;
  rep.total_newton = nr.trace.iterations;

  const BarrierSubproblem sub(prob, t);
  bool certified = false;
  if (nr.trace.reason == NewtonStop::Converged || nr.trace.reason == NewtonStop::NumericalFloor) {
    try {
      rep.dual = dual_point(sub, rep.x, nr.vhat, kCenterTol);
      certified = true;
    } catch (const NotCenteredError&) {
    }
  }
  if (!certified) {
    // Uncertified recovery for the partial report.
    rep.dual.lambda.clear();
    for (const auto& f : prob.inequalities()) {
      rep.dual.lambda.push_back(-1.0 / (t * f->value(rep.x)));
    }
    rep.dual.v = nr.vhat;
    for (double& e : rep.dual.v) e /= t;
    rep.dual.gap_bound = static_cast<double>(m) / t;
  }
  rep.outer.push_back(
      OuterRecord{t, nr.trace.iterations, prob.objective().value(rep.x), rep.dual.gap_bound});
  rep.status = certified ? SolveStatus::Optimal : SolveStatus::MaxIterations;
  return rep;
}

SolveReport solve_barrier(const ConvexProblem& prob, const Vec& x0, const BarrierConfig& cfg,
                          std::vector<TraceRow>* trace, const StepObserver& observer) {
  if (!(cfg.t0 > 0.0)) throw BadParamsError("solve_barrier: t0 must be positive");
  if (!(cfg.u > 1.0)) throw BadParamsError("solve_barrier: u must exceed 1");
  if (!(cfg.eps > 0.0)) throw BadParamsError("solve_barrier: eps must be positive");
  require_solvable_start(prob, x0);

  const std::size_t m = prob.num_inequalities();
  if (m == 0) return solve_without_barrier(prob, x0, cfg.t0, cfg.inner, trace, observer);

  SolveReport rep;
  Vec x = x0;
  double t = cfg.t0;
  for (std::size_t k = 0; k < cfg.max_outer; ++k) {
    NewtonResult nr = center_once(prob, t, std::move(x), cfg.inner, k + 1, trace, observer);
    x = std::move(nr.x);
    rep.total_newton += nr.trace.iterations;
    rep.x = x;
    rep.total_centerings = k + 1;

    if (nr.trace.reason == NewtonStop::CallbackStop || !centering_succeeded(nr.trace.reason)) {
      rep.status = SolveStatus::MaxIterations;
      return rep;
    }

    const BarrierSubproblem sub(prob, t);
    DualPoint dual;
    try {
      dual = dual_point(sub, x, nr.vhat, kCenterTol);
    } catch (const NotCenteredError&) {
      rep.status = SolveStatus::MaxIterations;
      return rep;
    }
    rep.outer.push_back(
        OuterRecord{t, nr.trace.iterations, prob.objective().value(x), dual.gap_bound});
    rep.dual = std::move(dual);

    if (rep.dual.gap_bound < cfg.eps) {
      rep.status = SolveStatus::Optimal;
      return rep;
    }
    t *= cfg.u;
  }
  rep.status = SolveStatus::MaxIterations;
  return rep;
}

std::size_t predict_outer_iterations(std::size_t m, double eps, double t0, double u) {
  if (!(eps > 0.0) || !(t0 > 0.0) || !(u > 1.0)) {
    throw BadParamsError("predict_outer_iterations: requires eps > 0, t0 > 0, u > 1");
  }
  const double md = static_cast<double>(m);
  if (md / t0 < eps) return 0;
  double ratio = std::log(md / (eps * t0)) / std::log(u);
  const double snapped = std::round(ratio);
  if (std::abs(ratio - snapped) < 1e-9) ratio = snapped;
  const double steps = std::ceil(ratio);
  return steps <= 0.0 ? 0 : static_cast<std::size_t>(steps);
}

PhaseOneResult phase1(const ConvexProblem& prob, const Vec& x0, const BarrierConfig& cfg) {
  const std::size_t n = prob.dimension();
  if (x0.size() != n) throw InfeasibleStartError("phase1: start has wrong dimension");
  for (std::size_t i = 0; i < prob.num_inequalities(); ++i) {
    if (!prob.inequalities()[i]->in_domain(x0)) {
      throw OutOfDomainError("phase1: start outside the domain of constraint " +
                             std::to_string(i));
    }
  }
  if (!prob.satisfies_equalities(x0)) {
    throw InfeasibleStartError("phase1: start violates the equality constraints");
  }

  if (prob.num_inequalities() == 0) return PhaseOneResult{true, x0, 0.0};
  const double worst = prob.max_inequality(x0);
  if (worst < 0.0) return PhaseOneResult{true, x0, 0.0};

  // Auxiliary problem over (x, s): minimize s subject to f_i(x) - s <= 0
  // and [A | 0](x, s) = b, started at s0 = max_i f_i(x0) + 1.
  std::vector<FieldPtr> shifted;
  shifted.reserve(prob.num_inequalities());
  for (const auto& f : prob.inequalities()) {
    shifted.push_back(std::make_shared<SlackShiftedField>(f));
  }
  Vec obj_coeffs(n + 1, 0.0);
  obj_coeffs[n] = 1.0;
  auto objective = std::make_shared<AffineField>(std::move(obj_coeffs), 0.0);
  const std::size_t p = prob.eq_matrix().rows();
  DenseMatrix eq_aug(p, n + 1);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < n; ++j) eq_aug(i, j) = prob.eq_matrix()(i, j);
  }
  const ConvexProblem aux(objective, std::move(shifted), std::move(eq_aug), prob.eq_rhs());

  Vec z0 = x0;
  z0.push_back(worst + 1.0);

  bool found = false;
  Vec feasible_x;
  const StepObserver watcher = [&](std::span<const double> z, double) {
    if (z[n] < 0.0) {
      found = true;
      feasible_x.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
      return false;
    }
    return true;
  };

  const SolveReport rep = solve_barrier(aux, z0, cfg, nullptr, watcher);
  if (found) return PhaseOneResult{true, std::move(feasible_x), 0.0};

  if (rep.status == SolveStatus::Optimal) {
    const double s_best = rep.x.back();
    const double evidence = s_best - rep.dual.gap_bound;
    if (evidence >= -cfg.eps) {
      return PhaseOneResult{false, {}, std::max(0.0, evidence)};
    }
    throw SolverFailureError("phase1: certificate inconsistent with the early-exit test");
  }
  throw SolverFailureError("phase1: auxiliary solve failed without a certificate");
}

}  // namespace cvxkit
