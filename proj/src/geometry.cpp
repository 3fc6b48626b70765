#include "cvxkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>

#include "cvxkit/kernels.hpp"

namespace cvxkit {

bool Polyhedron::contains(std::span<const double> x, double tol) const {
  const Vec gx = matvec(g, x);
  for (std::size_t i = 0; i < gx.size(); ++i) {
    if (gx[i] > h[i] + tol) return false;
  }
  return true;
}

Polyhedron voronoi_polyhedron(const Vec& x0, const std::vector<Vec>& others) {
  const std::size_t n = x0.size();
  if (n == 0) throw BadParamsError("voronoi_polyhedron: empty base point");
  const std::size_t k = others.size();
  DenseMatrix g(k, n);
  Vec h(k, 0.0);
  const double x0_sq = kernels::dot(x0, x0);
  for (std::size_t i = 0; i < k; ++i) {
    const Vec& xi = others[i];
    if (xi.size() != n) throw BadParamsError("voronoi_polyhedron: dimension mismatch");
    double row_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = 2.0 * (xi[j] - x0[j]);
      g(i, j) = r;
      row_sq += r * r;
    }
    if (row_sq == 0.0) {
      throw DegeneratePointError("voronoi_polyhedron: rival point " + std::to_string(i) +
                                 " coincides with the base point");
    }
    h[i] = kernels::dot(xi, xi) - x0_sq;
  }
  return Polyhedron{std::move(g), std::move(h)};
}

namespace {

struct ClosestPair {
  Vec c_star;
  Vec d_star;
  double dist_sq;
  double gap_bound;  // certified slack on dist_sq (0 for the direct case)
};

Vec combination(const std::vector<Vec>& pts, std::span<const double> weights, std::size_t n) {
  Vec out(n, 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) kernels::axpy(weights[i], pts[i], out);
  return out;
}

// Closest pair of points between two hulls via the simplex-weight program
// min |C alpha - D beta|^2, solved with the barrier method from uniform
// weights. Both singletons is answered directly.
ClosestPair closest_pair(const std::vector<Vec>& c_points, const std::vector<Vec>& d_points,
                         const BarrierConfig& cfg) {
  const std::size_t n = c_points.front().size();
  const std::size_t k1 = c_points.size();
  const std::size_t k2 = d_points.size();

  if (k1 == 1 && k2 == 1) {
    Vec diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = c_points[0][i] - d_points[0][i];
    return ClosestPair{c_points[0], d_points[0], kernels::dot(diff, diff), 0.0};
  }

  const std::size_t k = k1 + k2;
  // Columns of M are the C points followed by the negated D points, so
  // the objective is |M z|^2 = 0.5 z^T (2 M^T M) z.
  DenseMatrix m(n, k);
  for (std::size_t j = 0; j < k1; ++j) {
    for (std::size_t i = 0; i < n; ++i) m(i, j) = c_points[j][i];
  }
  for (std::size_t j = 0; j < k2; ++j) {
    for (std::size_t i = 0; i < n; ++i) m(i, k1 + j) = -d_points[j][i];
  }
  DenseMatrix q(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += m(i, a) * m(i, b);
      q(a, b) = 2.0 * acc;
    }
  }
  auto objective = std::make_shared<QuadraticField>(std::move(q), Vec(k, 0.0), 0.0);

  std::vector<FieldPtr> nonneg;
  nonneg.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Vec coeffs(k, 0.0);
    coeffs[i] = -1.0;
    nonneg.push_back(std::make_shared<AffineField>(std::move(coeffs), 0.0));
  }

  DenseMatrix eq(2, k);
  for (std::size_t j = 0; j < k1; ++j) eq(0, j) = 1.0;
  for (std::size_t j = 0; j < k2; ++j) eq(1, k1 + j) = 1.0;

  const ConvexProblem qp(objective, std::move(nonneg), std::move(eq), Vec{1.0, 1.0});

  Vec z0(k, 0.0);
  for (std::size_t j = 0; j < k1; ++j) z0[j] = 1.0 / static_cast<double>(k1);
  for (std::size_t j = 0; j < k2; ++j) z0[k1 + j] = 1.0 / static_cast<double>(k2);

  const SolveReport rep = solve_barrier(qp, z0, cfg);
  if (rep.status != SolveStatus::Optimal) {
    throw SolverFailureError("separating_hyperplane: closest-pair solve failed");
  }

  std::span<const double> z(rep.x);
  ClosestPair out;
  out.c_star = combination(c_points, z.subspan(0, k1), n);
  out.d_star = combination(d_points, z.subspan(k1, k2), n);
  Vec diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = out.c_star[i] - out.d_star[i];
  out.dist_sq = kernels::dot(diff, diff);
  out.gap_bound = rep.dual.gap_bound;
  return out;
}

}  // namespace

Hyperplane separating_hyperplane(const std::vector<Vec>& c_points,
                                 const std::vector<Vec>& d_points, const SeparationConfig& cfg) {
  if (c_points.empty() || d_points.empty()) {
    throw BadParamsError("separating_hyperplane: both point sets must be nonempty");
  }
  const std::size_t n = c_points.front().size();
  for (const auto& p : c_points) {
    if (p.size() != n) throw BadParamsError("separating_hyperplane: dimension mismatch in C");
  }
  for (const auto& p : d_points) {
    if (p.size() != n) throw BadParamsError("separating_hyperplane: dimension mismatch in D");
  }

  const ClosestPair pair = closest_pair(c_points, d_points, cfg.solve);
  const double certified_sq = std::max(0.0, pair.dist_sq - pair.gap_bound);
  if (std::sqrt(certified_sq) <= cfg.min_distance) {
    throw NotSeparableError("separating_hyperplane: hull distance lower bound " +
                            std::to_string(std::sqrt(certified_sq)) + " within " +
                            std::to_string(cfg.min_distance) + " of touching");
  }

  Hyperplane hp;
  hp.a.resize(n);
  for (std::size_t i = 0; i < n; ++i) hp.a[i] = pair.d_star[i] - pair.c_star[i];
  hp.b = 0.5 * (kernels::dot(hp.a, pair.c_star) + kernels::dot(hp.a, pair.d_star));
  return hp;
}

ChebyshevResult chebyshev_center(const std::vector<Vec>& points, const BarrierConfig& cfg) {
  if (points.empty()) throw BadParamsError("chebyshev_center: no points");
  const std::size_t n = points.front().size();
  for (const auto& p : points) {
    if (p.size() != n) throw BadParamsError("chebyshev_center: dimension mismatch");
  }
  if (points.size() == 1) return ChebyshevResult{points.front(), 0.0};

  const ConvexProblem prob = catalog_problem("chebyshev", CatalogParams{points});

  Vec center(n, 0.0);
  for (const auto& p : points) kernels::axpy(1.0 / static_cast<double>(points.size()), p, center);

  auto max_dist = [&](const Vec& c) {
    double worst = 0.0;
    for (const auto& p : points) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) d2 += (p[i] - c[i]) * (p[i] - c[i]);
      worst = std::max(worst, std::sqrt(d2));
    }
    return worst;
  };
  auto min_dist = [&](const Vec& c) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) d2 += (p[i] - c[i]) * (p[i] - c[i]);
      best = std::min(best, std::sqrt(d2));
    }
    return best;
  };

  // The norm constraints are undefined exactly at the data points; nudge
  // the start if the centroid happens to coincide with one.
  double spread = max_dist(center);
  if (min_dist(center) <= 1e-12 * (1.0 + spread)) {
    center[0] += 1e-3 * spread + 1e-9;
    spread = max_dist(center);
  }

  Vec z0 = center;
  z0.push_back(spread + 1.0);

  const SolveReport rep = solve_barrier(prob, z0, cfg);
  if (rep.status != SolveStatus::Optimal) {
    throw SolverFailureError("chebyshev_center: barrier solve failed");
  }
  ChebyshevResult out;
  out.center.assign(rep.x.begin(), rep.x.begin() + static_cast<std::ptrdiff_t>(n));
  out.radius = rep.x.back();
  return out;
}

ConvexityReport check_convexity_sampled(const ScalarField& f, const PointSampler& sampler,
                                        std::size_t trials) {
  ConvexityReport report;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const Vec x = sampler();
    const Vec y = sampler();
    if (!f.in_domain(x) || !f.in_domain(y)) {
      throw OutOfDomainError("check_convexity_sampled: sampler produced an out-of-domain point");
    }
    const double fx = f.value(x);
    const double fy = f.value(y);
    const Vec gx = f.gradient(x);
    double lin = fx;
    for (std::size_t i = 0; i < x.size(); ++i) lin += gx[i] * (y[i] - x[i]);
    const double slack = 1e-8 * (1.0 + std::abs(fy));
    ++report.pair_checks;
    if (fy < lin - slack) {
      report.violations.push_back(
          ConvexityViolation{ViolationKind::FirstOrder, x, y, lin - fy});
    }
    for (const Vec& pt : {x, y}) {
      ++report.hessian_checks;
      if (!is_positive_semidefinite(f.hessian(pt))) {
        report.violations.push_back(ConvexityViolation{ViolationKind::HessianNotPsd, pt, {}, 0.0});
      }
    }
  }
  return report;
}

OptimalityCheck verify_optimality_sampled(const ConvexProblem& prob, const Vec& x_cand,
                                          const Vec& x_strict, std::size_t samples,
                                          std::uint64_t seed) {
  const std::size_t n = prob.dimension();
  if (x_cand.size() != n || x_strict.size() != n) {
    throw BadParamsError("verify_optimality_sampled: dimension mismatch");
  }
  // Feasibility of the candidate (boundary allowed, small numeric slack).
  for (std::size_t i = 0; i < prob.num_inequalities(); ++i) {
    const auto& f = *prob.inequalities()[i];
    if (!f.in_domain(x_cand) || f.value(x_cand) > 1e-9 * (1.0 + std::abs(f.value(x_cand)))) {
      throw InfeasibleCandidateError("verify_optimality_sampled: candidate violates constraint " +
                                     std::to_string(i));
    }
  }
  if (!prob.satisfies_equalities(x_cand)) {
    throw InfeasibleCandidateError(
        "verify_optimality_sampled: candidate violates the equality constraints");
  }
  if (!prob.strictly_feasible(x_strict) || !prob.satisfies_equalities(x_strict)) {
    throw BadParamsError("verify_optimality_sampled: anchor is not strictly feasible");
  }

  const Vec grad = prob.objective().gradient(x_cand);
  const double slack = 1e-6 * (1.0 + norm_inf(grad));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const DenseMatrix& a = prob.eq_matrix();
  const std::size_t p = a.rows();
  DenseMatrix gram(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) gram(i, j) = kernels::dot(a.row(i), a.row(j));
  }

  auto project_null = [&](Vec d) {
    if (p == 0) return d;
    const Vec ad = matvec(a, d);
    const Vec w = lu_solve(gram, ad);
    const Vec atw = matvec_transposed(a, w);
    for (std::size_t i = 0; i < n; ++i) d[i] -= atw[i];
    return d;
  };

  const double scale = 1.0 + norm_inf(x_strict);
  double min_ip = std::numeric_limits<double>::infinity();

  for (std::size_t s = 0; s < samples; ++s) {
    Vec d(n);
    for (double& e : d) e = gauss(rng);
    d = project_null(std::move(d));
    const double dn = norm2(d);
    if (dn == 0.0) continue;
    const double radius = scale * std::abs(gauss(rng));
    for (double& e : d) e *= radius / dn;

    // Shrink toward the strictly feasible anchor until feasible.
    Vec y(n);
    bool ok = false;
    double shrink = 1.0;
    for (int attempt = 0; attempt < 40; ++attempt, shrink *= 0.5) {
      for (std::size_t i = 0; i < n; ++i) y[i] = x_strict[i] + shrink * d[i];
      if (prob.strictly_feasible(y)) {
        ok = true;
        break;
      }
    }
    if (!ok) y = x_strict;

    // Blend half the samples toward the candidate to probe its vicinity;
    // convex combinations of feasible points stay feasible.
    if (unif(rng) < 0.5) {
      const double tau = 0.05 + 0.95 * unif(rng);
      for (std::size_t i = 0; i < n; ++i) y[i] = x_cand[i] + tau * (y[i] - x_cand[i]);
    }

    double ip = 0.0;
    for (std::size_t i = 0; i < n; ++i) ip += grad[i] * (y[i] - x_cand[i]);
    min_ip = std::min(min_ip, ip);
  }

  return OptimalityCheck{min_ip >= -slack, min_ip};
}

}  // namespace cvxkit
