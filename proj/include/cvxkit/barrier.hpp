#pragma once

#include <cstddef>
#include <span>

#include "cvxkit/model.hpp"

namespace cvxkit {

/// The working problem at barrier parameter t > 0: minimize
/// t*f0(x) - sum_i log(-f_i(x)) subject to the base equalities, over the
/// strictly feasible set {x : f_i(x) < 0 for all i}.
struct BarrierSubproblem {
  BarrierSubproblem(ConvexProblem base_problem, double accuracy);

  ConvexProblem base;
  double t;
};

/// Multipliers recovered at an (approximate) center, with the certified
/// optimality gap bound m/t.
struct DualPoint {
  Vec lambda;        // length m, every component > 0
  Vec v;             // length p
  double gap_bound;  // m / t
};

/// The working objective t*f0 + phi as a ScalarField, so the Newton
/// machinery and the derivative checker apply to it unchanged. Its domain
/// is the strictly feasible set intersected with every base domain.
class BarrierObjective final : public ScalarField {
 public:
  explicit BarrierObjective(BarrierSubproblem sub);

  std::size_t dimension() const noexcept override;
  double value(std::span<const double> x) const override;
  Vec gradient(std::span<const double> x) const override;
  DenseMatrix hessian(std::span<const double> x) const override;
  bool in_domain(std::span<const double> x) const override;

  const BarrierSubproblem& subproblem() const noexcept { return sub_; }

 private:
  BarrierSubproblem sub_;
};

/// Value, gradient and Hessian of the working objective at a strictly
/// feasible x:
///   value    = t f0 - sum log(-f_i)
///   gradient = t grad f0 + sum (1 / -f_i) grad f_i
///   hessian  = t hess f0 + sum (1 / f_i^2) grad f_i grad f_i^T
///                        + sum (1 / -f_i) hess f_i
/// Throws NotStrictlyFeasibleError naming the first violated constraint.
Evaluation barrier_eval(const BarrierSubproblem& sub, std::span<const double> x);

/// The log-barrier value phi(x) = -sum log(-f_i(x)) alone.
double barrier_phi(const BarrierSubproblem& sub, std::span<const double> x);

/// Stationarity residual t grad f0(x) + grad phi(x) + A^T vhat. Vanishes
/// (together with Ax = b) exactly at the center for parameter t.
/// Requires x strictly feasible with Ax = b within 1e-8 relative.
Vec centering_residual(const BarrierSubproblem& sub, std::span<const double> x,
                       std::span<const double> vhat);

/// Recovers the dual pair at an approximate center:
///   lambda_i = -1 / (t f_i(x)) > 0,   v = vhat / t,   gap_bound = m / t.
/// The implied dual value is f0(x) - m/t, a lower-bound certificate on the
/// optimal value. Preconditions: the centering residual must satisfy
/// |r|_inf <= center_tol * (1 + |t grad f0|_inf + |grad phi|_inf); callers
/// declare how centered is centered enough. Throws NotCenteredError
/// otherwise.
DualPoint dual_point(const BarrierSubproblem& sub, std::span<const double> x_center,
                     std::span<const double> vhat, double center_tol);

}  // namespace cvxkit
