#include "cvxkit/newton.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cvxkit/kernels.hpp"

namespace cvxkit {

const char* to_string(NewtonStop reason) {
  switch (reason) {
    case NewtonStop::Converged: return "converged";
    case NewtonStop::NumericalFloor: return "numerical_floor";
    case NewtonStop::LineSearchStall: return "line_search_stall";
    case NewtonStop::MaxIterations: return "max_iterations";
    case NewtonStop::CallbackStop: return "callback_stop";
  }
  return "unknown";
}

double line_search(const ScalarField& f, std::span<const double> x, std::span<const double> dx,
                   std::span<const double> grad, const LineSearchParams& params) {
  const double slope = kernels::dot(grad, dx);
  if (!(slope < 0.0)) {
    throw NoDescentError("line_search: grad^T dx = " + std::to_string(slope) +
                         " is not a descent direction");
  }
  const double fx = f.value(x);
  Vec trial(x.begin(), x.end());
  double step = 1.0;
  for (int k = 0; k <= params.max_halvings; ++k) {
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = x[i] + step * dx[i];
    if (f.in_domain(trial)) {
      const double ft = f.value(trial);
      if (ft <= fx + params.alpha * step * slope) return step;
    }
    step *= params.beta;
  }
  throw LineSearchStallError("line_search: no acceptable step within " +
                             std::to_string(params.max_halvings) + " halvings");
}

namespace {

double eq_residual_norm(const DenseMatrix& a, const Vec& b, std::span<const double> x) {
  if (a.rows() == 0) return 0.0;
  Vec r = matvec(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return norm_inf(r);
}

// Objective decrements below this are indistinguishable from rounding in
// the value itself; the line search cannot certify descent past it.
double measurement_floor(double fx) {
  return 32.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx));
}

// Predicted decreases below this leave the iterate centered far beyond any
// downstream need; polishing stops here.
constexpr double kPolishDecrement = 1e-4;

}  // namespace

NewtonResult minimize_eq_newton(const ScalarField& f, const DenseMatrix& eq_matrix,
                                const Vec& eq_rhs, Vec x0, const NewtonOptions& opts,
                                const StepObserver& observer) {
  const std::size_t p = eq_matrix.rows();
  if (eq_rhs.size() != p) {
    throw ValidationError("minimize_eq_newton: equality rhs length mismatch");
  }
  if (x0.size() != f.dimension()) {
    throw InfeasibleStartError("minimize_eq_newton: start has wrong dimension");
  }
  if (!f.in_domain(x0)) {
    throw InfeasibleStartError("minimize_eq_newton: start outside the domain");
  }
  if (eq_residual_norm(eq_matrix, eq_rhs, x0) > 1e-8 * (1.0 + norm_inf(eq_rhs))) {
    throw InfeasibleStartError("minimize_eq_newton: start violates the equality constraints");
  }

  NewtonResult res;
  res.x = std::move(x0);
  res.vhat.assign(p, 0.0);
  res.trace.reason = NewtonStop::MaxIterations;

  double fx = f.value(res.x);
  const double eps_inner = opts.eps_inner >= 0.0 ? opts.eps_inner : 1e-10 * (1.0 + std::abs(fx));

  double prev_decrement = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    KktSystem sys{f.hessian(res.x), eq_matrix, f.gradient(res.x)};
    KktSolution sol = solve_kkt(sys);
    res.vhat = sol.w;
    double predicted = -0.5 * kernels::dot(sys.gradient, sol.dx);

    if (predicted <= measurement_floor(fx)) {
      // The objective can no longer witness descent. Take full (domain-
      // guarded) steps while the Newton model still predicts progress;
      // quadratic convergence makes this a handful of steps at most.
      int polish = 0;
      Vec trial(res.x.size());
      while (predicted > kPolishDecrement && polish < 6) {
        double step = 1.0;
        bool moved = false;
        for (int k = 0; k < 4 && !moved; ++k, step *= 0.5) {
          for (std::size_t i = 0; i < trial.size(); ++i) {
            trial[i] = res.x[i] + step * sol.dx[i];
          }
          if (f.in_domain(trial)) {
            res.x = trial;
            moved = true;
            ++res.trace.iterations;
            fx = f.value(res.x);
            res.trace.records.push_back(NewtonRecord{fx, step, norm_inf(f.gradient(res.x)),
                                                     eq_residual_norm(eq_matrix, eq_rhs, res.x),
                                                     true});
            if (observer && !observer(res.x, step)) {
              res.trace.reason = NewtonStop::CallbackStop;
              return res;
            }
          }
        }
        if (!moved) break;
        sys.hessian = f.hessian(res.x);
        sys.gradient = f.gradient(res.x);
        sol = solve_kkt(sys);
        res.vhat = sol.w;
        const double next_predicted = -0.5 * kernels::dot(sys.gradient, sol.dx);
        if (!(next_predicted < predicted)) break;
        predicted = next_predicted;
        ++polish;
      }
      res.trace.reason = NewtonStop::NumericalFloor;
      return res;
    }

    double step;
    try {
      step = line_search(f, res.x, sol.dx, sys.gradient, opts.ls);
    } catch (const LineSearchStallError&) {
      res.trace.reason = NewtonStop::LineSearchStall;
      return res;
    }

    for (std::size_t i = 0; i < res.x.size(); ++i) res.x[i] += step * sol.dx[i];
    const double fx_new = f.value(res.x);
    const double decrement = fx - fx_new;
    fx = fx_new;
    ++res.trace.iterations;
    res.trace.records.push_back(NewtonRecord{fx, step, norm_inf(f.gradient(res.x)),
                                             eq_residual_norm(eq_matrix, eq_rhs, res.x), false});
    if (observer && !observer(res.x, step)) {
      res.trace.reason = NewtonStop::CallbackStop;
      return res;
    }

    if (decrement <= eps_inner && prev_decrement <= eps_inner) {
      res.trace.reason = NewtonStop::Converged;
      return res;
    }
    prev_decrement = decrement;
  }

  res.trace.reason = NewtonStop::MaxIterations;
  return res;
}

}  // namespace cvxkit
