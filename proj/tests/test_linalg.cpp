#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cvxkit/linalg.hpp"

using namespace cvxkit;

namespace {

// Independent plain Gaussian elimination with partial pivoting, kept apart
// from the library's factorization path on purpose.
Vec reference_solve(DenseMatrix a, Vec b) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    double acc = b[k];
    for (std::size_t j = k + 1; j < n; ++j) acc -= a(k, j) * x[j];
    x[k] = acc / a(k, k);
  }
  return x;
}

DenseMatrix augmented(const KktSystem& sys) {
  const std::size_t n = sys.hessian.rows();
  const std::size_t p = sys.eq_matrix.rows();
  DenseMatrix k(n + p, n + p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k(i, j) = sys.hessian(i, j);
    for (std::size_t j = 0; j < p; ++j) k(i, n + j) = sys.eq_matrix(j, i);
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < n; ++j) k(n + i, j) = sys.eq_matrix(i, j);
  }
  return k;
}

double kkt_residual(const KktSystem& sys, const KktSolution& sol) {
  const std::size_t n = sys.hessian.rows();
  const std::size_t p = sys.eq_matrix.rows();
  Vec z = sol.dx;
  z.insert(z.end(), sol.w.begin(), sol.w.end());
  Vec rhs(n + p, 0.0);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -sys.gradient[i];
  const Vec kz = matvec(augmented(sys), z);
  double r = 0.0;
  for (std::size_t i = 0; i < n + p; ++i) r = std::max(r, std::abs(kz[i] - rhs[i]));
  return r;
}

}  // namespace

TEST_CASE("solve_kkt: unconstrained 1-d step is -H^{-1} g") {
  KktSystem sys{DenseMatrix(1, 1, {1.0}), DenseMatrix(0, 1), {3.0}};
  const KktSolution sol = solve_kkt(sys);
  REQUIRE(sol.dx.size() == 1);
  CHECK(sol.dx[0] == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(sol.w.empty());
}

TEST_CASE("solve_kkt: 3x3 augmented solve, g = (2, 0)") {
  // Direct dense solve of [[2,0,1],[0,2,1],[1,1,0]] (dx, w) = (-2, 0, 0):
  // dx = (-0.5, 0.5), w = -1; verified below by substitution.
  KktSystem sys{DenseMatrix(2, 2, {2, 0, 0, 2}), DenseMatrix(1, 2, {1, 1}), {2.0, 0.0}};
  const KktSolution sol = solve_kkt(sys);
  CHECK(sol.dx[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(sol.dx[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.w[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(kkt_residual(sys, sol) <= 1e-12);
}

TEST_CASE("solve_kkt: one-step Newton system of the equality-constrained quadratic") {
  KktSystem sys{DenseMatrix(2, 2, {2, 0, 0, 2}), DenseMatrix(1, 2, {1, 1}), {4.0, 0.0}};
  const KktSolution sol = solve_kkt(sys);
  CHECK(sol.dx[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(sol.dx[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.w[0] == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("solve_kkt: singular system is reported") {
  KktSystem sys{DenseMatrix(1, 1, {0.0}), DenseMatrix(0, 1), {1.0}};
  CHECK_THROWS_AS(solve_kkt(sys), SingularKktError);

  // H singular and A unable to fix it: dx direction (1, -1) is in both
  // nullspaces, so the augmented matrix is singular.
  KktSystem bad{DenseMatrix(2, 2, {1, 1, 1, 1}), DenseMatrix(1, 2, {1, 1}), {1.0, 0.0}};
  CHECK_THROWS_AS(solve_kkt(bad), SingularKktError);
}

TEST_CASE("solve_kkt: asymmetric Hessian is rejected") {
  KktSystem sys{DenseMatrix(2, 2, {1, 0.5, 0, 1}), DenseMatrix(0, 2), {1.0, 1.0}};
  CHECK_THROWS_AS(solve_kkt(sys), NotSymmetricError);
}

TEST_CASE("solve_kkt residual property on random nonsingular systems") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    const std::size_t p = rng() % (n / 2 + 1);
    DenseMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = gauss(rng);
        h(i, j) = v;
        h(j, i) = v;
      }
    }
    DenseMatrix a(p, n);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j < n; ++j) a(i, j) = gauss(rng);
    }
    Vec g(n);
    for (double& e : g) e = gauss(rng);

    KktSystem sys{std::move(h), std::move(a), std::move(g)};
    KktSolution sol;
    try {
      sol = solve_kkt(sys);
    } catch (const SingularKktError&) {
      continue;  // random draw hit the pivot threshold; precondition excludes it
    }
    CHECK(kkt_residual(sys, sol) <= 1e-9 * (1.0 + norm_inf(sys.gradient)));

    if (p > 0) {
      const Vec adx = matvec(sys.eq_matrix, sol.dx);
      CHECK(norm_inf(adx) <= 1e-9 * (1.0 + norm_inf(sol.dx)));
    }
  }
}

TEST_CASE("solve_kkt with p = 0 matches an independent dense solve") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    // H = B^T B + I is positive definite.
    DenseMatrix b(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) b(i, j) = gauss(rng);
    }
    DenseMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = i == j ? 1.0 : 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += b(k, i) * b(k, j);
        h(i, j) = acc;
      }
    }
    Vec g(n);
    for (double& e : g) e = gauss(rng);

    Vec neg_g = g;
    for (double& e : neg_g) e = -e;
    const Vec expected = reference_solve(h, neg_g);

    const KktSolution sol = solve_kkt(KktSystem{h, DenseMatrix(0, n), g});
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(sol.dx[i] - expected[i]) <= 1e-10 * (1.0 + std::abs(expected[i])));
    }
  }
}

TEST_CASE("is_positive_semidefinite on the reference matrices") {
  // Second-difference matrix: eigenvalues 2 - sqrt(2), 2, 2 + sqrt(2).
  const DenseMatrix tri(3, 3, {2, -1, 0, -1, 2, -1, 0, -1, 2});
  CHECK(is_positive_semidefinite(tri));
  CHECK(is_positive_semidefinite(DenseMatrix::identity(3)));
  CHECK_FALSE(is_positive_semidefinite(DenseMatrix(1, 1, {-1.0})));
  CHECK(is_positive_semidefinite(DenseMatrix(2, 2)));  // zero matrix, tol 0
  CHECK_FALSE(is_positive_semidefinite(DenseMatrix(2, 2, {0, 1, 1, 0})));
}

TEST_CASE("is_positive_semidefinite rejects asymmetric input") {
  CHECK_THROWS_AS(is_positive_semidefinite(DenseMatrix(2, 2, {0, 1, 0, 0})), NotSymmetricError);
}

TEST_CASE("PSD verdict is invariant under symmetric permutation") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 8;
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = gauss(rng);
        m(i, j) = v;
        m(j, i) = v;
      }
    }
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    DenseMatrix pm(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) pm(i, j) = m(perm[i], perm[j]);
    }
    CHECK(is_positive_semidefinite(m, 1e-9) == is_positive_semidefinite(pm, 1e-9));
  }
}

TEST_CASE("symmetric_eigenvalues on a known spectrum") {
  const DenseMatrix tri(3, 3, {2, -1, 0, -1, 2, -1, 0, -1, 2});
  const Vec eigs = symmetric_eigenvalues(tri);
  CHECK(eigs[0] == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(eigs[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(eigs[2] == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("DenseMatrix validates the entry count") {
  CHECK_THROWS_AS(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), ValidationError);
}
