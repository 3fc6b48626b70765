#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cvxkit/model.hpp"

namespace cvxkit {

/// Backtracking line search parameters.
struct LineSearchParams {
  double alpha = 0.25;     // sufficient-decrease fraction, in (0, 0.5)
  double beta = 0.5;       // shrink factor, in (0, 1)
  int max_halvings = 60;   // candidates tried before declaring a stall
};

enum class NewtonStop {
  Converged,       // two consecutive decrements <= eps_inner
  NumericalFloor,  // predicted decrease below objective measurement noise
  LineSearchStall, // no acceptable step within max_halvings
  MaxIterations,
  CallbackStop,    // observer requested termination
};

const char* to_string(NewtonStop reason);

struct NewtonRecord {
  double objective;      // working objective after the step
  double step;           // accepted step length
  double gradient_norm;  // |grad|_inf after the step
  double eq_residual;    // |A x - b|_inf after the step
  bool polish;           // taken in the sub-measurement refinement phase
};

struct NewtonTrace {
  std::vector<NewtonRecord> records;
  std::size_t iterations = 0;
  NewtonStop reason = NewtonStop::MaxIterations;
};

/// Backtracks over candidate steps {1, beta, beta^2, ...} and returns the
/// first (largest) one whose trial point lies strictly inside the domain
/// and satisfies f(x + s dx) <= f(x) + alpha s grad^T dx. The domain guard
/// runs before the sufficient-decrease test, so boundary-crossing
/// candidates are rejected outright.
/// Throws NoDescentError when grad^T dx >= 0 and LineSearchStallError when
/// max_halvings candidates are exhausted.
double line_search(const ScalarField& f, std::span<const double> x, std::span<const double> dx,
                   std::span<const double> grad, const LineSearchParams& params);

struct NewtonOptions {
  LineSearchParams ls;
  /// Stopping threshold for the two-consecutive-decrements rule; negative
  /// means the scale-aware default 1e-10 * (1 + |f(x0)|).
  double eps_inner = -1.0;
  std::size_t max_iter = 200;
};

/// Called after every accepted or polish step with the new iterate and the
/// step length; returning false stops the solve (NewtonStop::CallbackStop).
using StepObserver = std::function<bool(std::span<const double> x, double step)>;

struct NewtonResult {
  Vec x;
  Vec vhat;  // equality multipliers from the final block solve
  NewtonTrace trace;
};

/// Equality-constrained Newton descent on a working objective. Every
/// iterate keeps A x = b (the step solves the block system, so A dx = 0);
/// steps are chosen by domain-guarded backtracking. Terminates when two
/// consecutive objective decrements fall to eps_inner or below, when the
/// predicted decrease of the next step drops beneath the objective's
/// floating-point measurement noise (after a short full-step polish
/// phase), on a line-search stall, or at max_iter.
/// With p = 0 this is plain damped Newton's method.
/// Throws InfeasibleStartError when x0 violates A x0 = b (within 1e-8
/// relative) or lies outside the domain; propagates SingularKktError.
NewtonResult minimize_eq_newton(const ScalarField& f, const DenseMatrix& eq_matrix,
                                const Vec& eq_rhs, Vec x0, const NewtonOptions& opts = {},
                                const StepObserver& observer = {});

}  // namespace cvxkit
