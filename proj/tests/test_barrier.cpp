#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "cvxkit/barrier.hpp"

using namespace cvxkit;

namespace {

// minimize 0 subject to x <= 200, the single-constraint fixture.
ConvexProblem single_constraint_problem() {
  auto objective = std::make_shared<QuadraticField>(DenseMatrix(1, 1, {0.0}), Vec{0.0}, 0.0);
  std::vector<FieldPtr> ineqs = {std::make_shared<AffineField>(Vec{1.0}, 200.0)};
  return ConvexProblem(objective, std::move(ineqs), DenseMatrix(0, 1), {});
}

// minimize x^2 subject to x <= 1.
ConvexProblem scalar_constrained_problem() {
  auto objective = std::make_shared<QuadraticField>(DenseMatrix(1, 1, {2.0}), Vec{0.0}, 0.0);
  std::vector<FieldPtr> ineqs = {std::make_shared<AffineField>(Vec{1.0}, 1.0)};
  return ConvexProblem(objective, std::move(ineqs), DenseMatrix(0, 1), {});
}

// Center of the t = 1 subproblem of min x^2 s.t. x <= 1: the root of
// 2x + 1/(1 - x) = 0, i.e. 2x^2 - 2x - 1 = 0, inside the domain x < 1.
// Quadratic formula: x = (1 - sqrt(3)) / 2.
const double kScalarCenter = (1.0 - std::sqrt(3.0)) / 2.0;

}  // namespace

TEST_CASE("barrier_eval: single constraint at x = 100, t = 1") {
  const BarrierSubproblem sub(single_constraint_problem(), 1.0);
  const Evaluation ev = barrier_eval(sub, Vec{100.0});
  CHECK(ev.value == doctest::Approx(-std::log(100.0)).epsilon(1e-14));
  CHECK(ev.gradient[0] == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(ev.hessian(0, 0) == doctest::Approx(0.0001).epsilon(1e-14));
}

TEST_CASE("barrier_eval: no inequalities means t * f0 exactly") {
  auto objective = std::make_shared<QuadraticField>(DenseMatrix(1, 1, {2.0}), Vec{0.0}, 0.0);
  const ConvexProblem prob(objective, {}, DenseMatrix(0, 1), {});
  const BarrierSubproblem sub(prob, 7.0);
  const Evaluation ev = barrier_eval(sub, Vec{3.0});
  CHECK(ev.value == doctest::Approx(7.0 * 9.0));
  CHECK(ev.gradient[0] == doctest::Approx(7.0 * 6.0));
}

TEST_CASE("barrier_eval on the catalog problem at (100, 50, 300), t = 10") {
  // Slacks by substitution: 50, 4650, 5800; f0 = 82500.
  const BarrierSubproblem sub(catalog_problem("example6"), 10.0);
  const Vec x{100, 50, 300};
  const Evaluation ev = barrier_eval(sub, x);
  const double expected =
      10.0 * 82500.0 - std::log(50.0) - std::log(4650.0) - std::log(5800.0);
  CHECK(ev.value == doctest::Approx(expected).epsilon(1e-14));

  // Cross-check the analytic derivatives against finite differences.
  const BarrierObjective obj(sub);
  const DerivativeReport dr = check_derivatives(obj, x, default_fd_step(x));
  CHECK(dr.max_gradient_error <= 1e-5);
  CHECK(dr.max_hessian_error <= 1e-5);
}

TEST_CASE("barrier_eval names the first violated constraint") {
  const BarrierSubproblem sub(catalog_problem("example6"), 1.0);
  try {
    barrier_eval(sub, Vec{150.0, 60.0, 250.0});  // f1 = 10 > 0
    FAIL("expected NotStrictlyFeasibleError");
  } catch (const NotStrictlyFeasibleError& e) {
    CHECK(e.constraint_index() == 0);
  }
  try {
    barrier_eval(sub, Vec{100.0, 1650.0, 300.0});  // f1 fine? 100+1650-200 > 0 -> index 0
    FAIL("expected NotStrictlyFeasibleError");
  } catch (const NotStrictlyFeasibleError&) {
  }
  try {
    barrier_eval(sub, Vec{-700.0, 50.0, 1100.0});  // f2 = -700+250+11000-8000 = 2550 > 0
    FAIL("expected NotStrictlyFeasibleError");
  } catch (const NotStrictlyFeasibleError& e) {
    CHECK(e.constraint_index() == 1);
  }
}

TEST_CASE("barrier gradient and Hessian match finite differences at feasible probes") {
  const BarrierSubproblem sub(catalog_problem("example6"), 3.0);
  const BarrierObjective obj(sub);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unif(-50.0, 50.0);
  int checked = 0;
  while (checked < 10) {
    Vec x{100.0 + unif(rng), 50.0 + unif(rng), 0.0};
    x[2] = 400.0 - x[0];
    if (!obj.in_domain(x)) continue;
    const DerivativeReport dr = check_derivatives(obj, x, default_fd_step(x));
    CHECK(dr.max_gradient_error <= 1e-5);
    CHECK(dr.max_hessian_error <= 1e-5);
    ++checked;
  }
}

TEST_CASE("barrier Hessian is PSD on convex problems") {
  const BarrierSubproblem sub(catalog_problem("example6"), 10.0);
  const BarrierObjective obj(sub);
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(-120.0, 90.0);
  int checked = 0;
  while (checked < 20) {
    Vec x{unif(rng), unif(rng), 0.0};
    x[2] = 400.0 - x[0];
    if (!obj.in_domain(x)) continue;
    CHECK(is_positive_semidefinite(obj.hessian(x)));
    ++checked;
  }
}

TEST_CASE("centering_residual: unconstrained optimum has zero residual") {
  auto objective = std::make_shared<QuadraticField>(DenseMatrix(1, 1, {2.0}), Vec{0.0}, 0.0);
  const ConvexProblem prob(objective, {}, DenseMatrix(0, 1), {});
  const BarrierSubproblem sub(prob, 1.0);
  const Vec r = centering_residual(sub, Vec{0.0}, {});
  CHECK(std::abs(r[0]) <= 1e-15);
}

TEST_CASE("centering_residual vanishes at the scalar center") {
  const BarrierSubproblem sub(scalar_constrained_problem(), 1.0);
  CHECK(kScalarCenter == doctest::Approx(-0.3660254037844386).epsilon(1e-15));
  const Vec r = centering_residual(sub, Vec{kScalarCenter}, {});
  CHECK(std::abs(r[0]) <= 1e-12);

  // And is nonzero off the center.
  const Vec r2 = centering_residual(sub, Vec{0.5}, {});
  CHECK(std::abs(r2[0]) > 1.0);
}

TEST_CASE("centering_residual is affine in vhat") {
  const BarrierSubproblem sub(catalog_problem("example6"), 5.0);
  const Vec x{100, 50, 300};
  const Vec r0 = centering_residual(sub, x, Vec{2.0});
  const Vec r1 = centering_residual(sub, x, Vec{2.0 + 0.75});
  // Shift by delta changes the residual by A^T delta = (0.75, 0, 0.75).
  CHECK(r1[0] - r0[0] == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(r1[1] - r0[1] == doctest::Approx(0.0));
  CHECK(r1[2] - r0[2] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("dual_point at the scalar center") {
  const BarrierSubproblem sub(scalar_constrained_problem(), 1.0);
  const DualPoint d = dual_point(sub, Vec{kScalarCenter}, {}, 1e-8);
  // lambda = 1/(1 - x*) = 2/(1 + sqrt(3)) = sqrt(3) - 1; centrality forces
  // lambda = -2 x* as well.
  CHECK(d.lambda[0] == doctest::Approx(std::sqrt(3.0) - 1.0).epsilon(1e-12));
  CHECK(d.lambda[0] == doctest::Approx(-2.0 * kScalarCenter).epsilon(1e-12));
  CHECK(d.gap_bound == 1.0);

  // Weak duality against the optimum p* = 0 at x = 0:
  // f0(x*) - m/t = x*^2 - 1 <= 0.
  const double dual_value = kScalarCenter * kScalarCenter - d.gap_bound;
  CHECK(dual_value == doctest::Approx(-0.8660254037844386).epsilon(1e-12));
  CHECK(dual_value <= 0.0);
}

TEST_CASE("dual_point rejects uncentered points") {
  const BarrierSubproblem sub(scalar_constrained_problem(), 1.0);
  CHECK_THROWS_AS(dual_point(sub, Vec{0.5}, {}, 1e-8), NotCenteredError);
}

TEST_CASE("dual_point with no inequalities has gap zero") {
  auto objective = std::make_shared<QuadraticField>(DenseMatrix(1, 1, {2.0}), Vec{0.0}, 0.0);
  const ConvexProblem prob(objective, {}, DenseMatrix(0, 1), {});
  const BarrierSubproblem sub(prob, 1.0);
  const DualPoint d = dual_point(sub, Vec{0.0}, {}, 1e-8);
  CHECK(d.lambda.empty());
  CHECK(d.gap_bound == 0.0);
}

TEST_CASE("weak duality holds for random feasible points of the scalar problem") {
  const BarrierSubproblem sub(scalar_constrained_problem(), 1.0);
  const DualPoint d = dual_point(sub, Vec{kScalarCenter}, {}, 1e-8);
  const double claimed = kScalarCenter * kScalarCenter - d.gap_bound;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(-5.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double y = unif(rng);
    const double fy = y * y;
    CHECK(claimed <= fy + 1e-6 * (1.0 + std::abs(fy)));
  }
}

TEST_CASE("lambda components are strictly positive at strictly feasible points") {
  const BarrierSubproblem sub(catalog_problem("example6"), 10.0);
  // Recover multipliers by formula at a well-centered point found by hand
  // is overkill here; the positivity claim only needs strict feasibility,
  // so probe the formula directly.
  const Vec x{100, 50, 300};
  for (const auto& f : sub.base.inequalities()) {
    CHECK(-1.0 / (sub.t * f->value(x)) > 0.0);
  }
}

TEST_CASE("BarrierSubproblem validates t") {
  CHECK_THROWS_AS(BarrierSubproblem(catalog_problem("example6"), 0.0), BadParamsError);
  CHECK_THROWS_AS(BarrierSubproblem(catalog_problem("example6"), -3.0), BadParamsError);
}
