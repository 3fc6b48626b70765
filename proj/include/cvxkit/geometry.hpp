#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cvxkit/solver.hpp"

namespace cvxkit {

/// {x : G x <= h componentwise}. No zero rows.
struct Polyhedron {
  DenseMatrix g;
  Vec h;

  bool contains(std::span<const double> x, double tol = 0.0) const;
};

/// {x : a^T x = b} with a != 0.
struct Hyperplane {
  Vec a;
  double b;
};

/// The cell of points at least as close to x0 as to each rival point:
/// row i is 2(x_i - x0)^T with right-hand side x_i^T x_i - x0^T x0.
/// Throws DegeneratePointError when some rival equals x0.
Polyhedron voronoi_polyhedron(const Vec& x0, const std::vector<Vec>& others);

/// Default solver settings for the geometry routines, at the given gap.
inline BarrierConfig geometry_solve_config(double eps) {
  BarrierConfig cfg;
  cfg.eps = eps;
  return cfg;
}

struct SeparationConfig {
  BarrierConfig solve = geometry_solve_config(1e-12);
  double min_distance = 1e-6;  // hulls closer than this are "touching"
};

/// Separates the convex hulls of two finite point sets: solves the
/// closest-pair problem min |C alpha - D beta|^2 over simplex weights with
/// this library's own barrier solver, then returns a = d* - c* and the
/// midpoint offset b = (a^T c* + a^T d*)/2, so that a^T x - b <= 0 on C
/// and >= 0 on D. Throws NotSeparableError when the certified lower bound
/// sqrt(max(0, dist^2 - gap)) on the hull distance falls to min_distance
/// or below; hulls within sqrt(2)*min_distance of touching may be
/// conservatively reported NotSeparable.
Hyperplane separating_hyperplane(const std::vector<Vec>& c_points,
                                 const std::vector<Vec>& d_points,
                                 const SeparationConfig& cfg = {});

struct ChebyshevResult {
  Vec center;
  double radius;
};

/// Center and radius of the smallest enclosing ball of a finite point set.
/// k = 1 is answered directly (the optimum sits on the barrier domain
/// boundary); otherwise the catalog "chebyshev" program is solved from the
/// strictly feasible start (centroid, max distance + 1).
ChebyshevResult chebyshev_center(const std::vector<Vec>& points,
                                 const BarrierConfig& cfg = geometry_solve_config(1e-8));

using PointSampler = std::function<Vec()>;

enum class ViolationKind { FirstOrder, HessianNotPsd };

struct ConvexityViolation {
  ViolationKind kind;
  Vec x;
  Vec y;          // second point of the pair for FirstOrder
  double amount;  // size of the violation
};

struct ConvexityReport {
  std::vector<ConvexityViolation> violations;
  std::size_t pair_checks = 0;
  std::size_t hessian_checks = 0;

  bool consistent() const noexcept { return violations.empty(); }
};

/// Sampled falsification of convexity, never a certificate: checks the
/// gradient inequality f(y) >= f(x) + grad f(x)^T (y - x) on sampled pairs
/// (with slack 1e-8 * (1 + |f(y)|)) and positive semidefiniteness of the
/// Hessian at sampled points. The sampler must yield in-domain points with
/// in-domain connecting segments.
ConvexityReport check_convexity_sampled(const ScalarField& f, const PointSampler& sampler,
                                        std::size_t trials);

struct OptimalityCheck {
  bool optimal;
  double min_inner_product;  // worst grad f0(x)^T (y - x) over sampled y
};

/// Sampled test of the first-order optimality criterion
/// grad f0(x_cand)^T (y - x_cand) >= 0 over feasible y, with slack
/// 1e-6 * (1 + |grad f0|_inf). Feasible samples are drawn by rejection
/// around the supplied strictly feasible anchor and blended toward the
/// candidate. Throws InfeasibleCandidateError when x_cand is infeasible.
OptimalityCheck verify_optimality_sampled(const ConvexProblem& prob, const Vec& x_cand,
                                          const Vec& x_strict, std::size_t samples,
                                          std::uint64_t seed = 0);

}  // namespace cvxkit
