#include "cvxkit/barrier.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "cvxkit/kernels.hpp"

namespace cvxkit {

BarrierSubproblem::BarrierSubproblem(ConvexProblem base_problem, double accuracy)
    : base(std::move(base_problem)), t(accuracy) {
  if (!(t > 0.0)) throw BadParamsError("BarrierSubproblem: t must be positive");
}

namespace {

// Throws NotStrictlyFeasibleError naming the first constraint whose domain
// or strict inequality fails; OutOfDomainError for the objective's domain.
void require_strictly_feasible(const BarrierSubproblem& sub, std::span<const double> x) {
  if (!sub.base.objective().in_domain(x)) {
    throw OutOfDomainError("barrier: point outside the objective's domain");
  }
  const auto& ineqs = sub.base.inequalities();
  for (std::size_t i = 0; i < ineqs.size(); ++i) {
    if (!ineqs[i]->in_domain(x) || ineqs[i]->value(x) >= 0.0) {
      throw NotStrictlyFeasibleError(
          i, "barrier: constraint " + std::to_string(i) + " not strictly satisfied");
    }
  }
}

}  // namespace

BarrierObjective::BarrierObjective(BarrierSubproblem sub) : sub_(std::move(sub)) {}

std::size_t BarrierObjective::dimension() const noexcept { return sub_.base.dimension(); }

bool BarrierObjective::in_domain(std::span<const double> x) const {
  if (x.size() != dimension() || !sub_.base.objective().in_domain(x)) return false;
  for (const auto& f : sub_.base.inequalities()) {
    if (!f->in_domain(x) || f->value(x) >= 0.0) return false;
  }
  return true;
}

double BarrierObjective::value(std::span<const double> x) const {
  double v = sub_.t * sub_.base.objective().value(x);
  for (const auto& f : sub_.base.inequalities()) v -= std::log(-f->value(x));
  return v;
}

Vec BarrierObjective::gradient(std::span<const double> x) const {
  Vec g = sub_.base.objective().gradient(x);
  for (double& e : g) e *= sub_.t;
  for (const auto& f : sub_.base.inequalities()) {
    kernels::axpy(1.0 / -f->value(x), f->gradient(x), g);
  }
  return g;
}

DenseMatrix BarrierObjective::hessian(std::span<const double> x) const {
  const std::size_t n = dimension();
  DenseMatrix h = sub_.base.objective().hessian(x);
  for (std::size_t r = 0; r < n; ++r) {
    for (double& e : h.row(r)) e *= sub_.t;
  }
  for (const auto& f : sub_.base.inequalities()) {
    const double fi = f->value(x);
    const Vec gi = f->gradient(x);
    const double w1 = 1.0 / (fi * fi);
    for (std::size_t r = 0; r < n; ++r) {
      kernels::axpy(w1 * gi[r], gi, h.row(r));
    }
    const DenseMatrix hi = f->hessian(x);
    const double w2 = 1.0 / -fi;
    for (std::size_t r = 0; r < n; ++r) {
      kernels::axpy(w2, hi.row(r), h.row(r));
    }
  }
  return h;
}

Evaluation barrier_eval(const BarrierSubproblem& sub, std::span<const double> x) {
  require_strictly_feasible(sub, x);
  const BarrierObjective obj(sub);
  return Evaluation{obj.value(x), obj.gradient(x), obj.hessian(x)};
}

double barrier_phi(const BarrierSubproblem& sub, std::span<const double> x) {
  require_strictly_feasible(sub, x);
  double phi = 0.0;
  for (const auto& f : sub.base.inequalities()) phi -= std::log(-f->value(x));
  return phi;
}

Vec centering_residual(const BarrierSubproblem& sub, std::span<const double> x,
                       std::span<const double> vhat) {
  require_strictly_feasible(sub, x);
  if (!sub.base.satisfies_equalities(x)) {
    throw ValidationError("centering_residual: point violates the equality constraints");
  }
  if (vhat.size() != sub.base.eq_matrix().rows()) {
    throw ValidationError("centering_residual: vhat length does not match equality rows");
  }
  const BarrierObjective obj(sub);
  Vec r = obj.gradient(x);
  if (!vhat.empty()) {
    const Vec atv = matvec_transposed(sub.base.eq_matrix(), vhat);
    kernels::axpy(1.0, atv, r);
  }
  return r;
}

DualPoint dual_point(const BarrierSubproblem& sub, std::span<const double> x_center,
                     std::span<const double> vhat, double center_tol) {
  const Vec r = centering_residual(sub, x_center, vhat);

  // Residual scale: the working gradient's two constituents.
  Vec tg = sub.base.objective().gradient(x_center);
  for (double& e : tg) e *= sub.t;
  double phi_grad_norm = 0.0;
  {
    Vec pg(x_center.size(), 0.0);
    for (const auto& f : sub.base.inequalities()) {
      kernels::axpy(1.0 / -f->value(x_center), f->gradient(x_center), pg);
    }
    phi_grad_norm = norm_inf(pg);
  }
  const double scale = 1.0 + norm_inf(tg) + phi_grad_norm;
  if (norm_inf(r) > center_tol * scale) {
    throw NotCenteredError("dual_point: centering residual " + std::to_string(norm_inf(r)) +
                           " exceeds tolerance " + std::to_string(center_tol * scale));
  }

  const auto& ineqs = sub.base.inequalities();
  DualPoint d;
  d.lambda.reserve(ineqs.size());
  for (const auto& f : ineqs) d.lambda.push_back(-1.0 / (sub.t * f->value(x_center)));
  d.v.assign(vhat.begin(), vhat.end());
  for (double& e : d.v) e /= sub.t;
  d.gap_bound = static_cast<double>(ineqs.size()) / sub.t;
  return d;
}

}  // namespace cvxkit
