#include "cvxkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cvxkit/kernels.hpp"

namespace cvxkit {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Vec entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) {
    throw ValidationError("DenseMatrix: entries length " + std::to_string(entries_.size()) +
                          " does not equal rows*cols = " + std::to_string(rows_ * cols_));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = i + 1; j < cols_; ++j) {
      const double a = (*this)(i, j);
      const double b = (*this)(j, i);
      if (std::abs(a - b) > tol * (1.0 + std::abs(a))) return false;
    }
  }
  return true;
}

Vec matvec(const DenseMatrix& m, std::span<const double> x) {
  Vec y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) y[i] = kernels::dot(m.row(i), x);
  return y;
}

Vec matvec_transposed(const DenseMatrix& m, std::span<const double> x) {
  Vec y(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) kernels::axpy(x[i], m.row(i), y);
  return y;
}

double norm_inf(std::span<const double> v) {
  double r = 0.0;
  for (double e : v) r = std::max(r, std::abs(e));
  return r;
}

double norm2(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

namespace {

// In-place LU with partial pivoting. perm[i] records the row swapped into
// position i. Throws SingularKktError when a pivot falls to
// 1e-12 * max|entry| of the input matrix or below.
void lu_factor(DenseMatrix& a, std::vector<std::size_t>& perm) {
  const std::size_t n = a.rows();
  perm.resize(n);
  double max_entry = norm_inf(a.entries());
  const double pivot_floor = 1e-12 * max_entry;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(a(i, k));
      if (cand > best) {
        best = cand;
        piv = i;
      }
    }
    if (!(best > pivot_floor)) {
      throw SingularKktError("singular system: pivot " + std::to_string(best) +
                             " at column " + std::to_string(k) + " underflows threshold " +
                             std::to_string(pivot_floor));
    }
    perm[k] = piv;
    if (piv != k) {
      auto rk = a.row(k);
      auto rp = a.row(piv);
      std::swap_ranges(rk.begin(), rk.end(), rp.begin());
    }
    const double inv_pivot = 1.0 / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double factor = a(i, k) * inv_pivot;
      a(i, k) = factor;
      if (factor != 0.0) {
        // trailing-row update: row_i -= factor * row_k over columns k+1..n
        kernels::axpy(-factor, a.row(k).subspan(k + 1), a.row(i).subspan(k + 1));
      }
    }
  }
}

void lu_apply(const DenseMatrix& lu, const std::vector<std::size_t>& perm, Vec& b) {
  const std::size_t n = lu.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (perm[k] != k) std::swap(b[k], b[perm[k]]);
    for (std::size_t i = k + 1; i < n; ++i) b[i] -= lu(i, k) * b[k];
  }
  for (std::size_t k = n; k-- > 0;) {
    b[k] = (b[k] - kernels::dot(lu.row(k).subspan(k + 1), std::span<const double>(b).subspan(k + 1))) /
           lu(k, k);
  }
}

DenseMatrix assemble_augmented(const KktSystem& sys) {
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

}  // namespace

Vec lu_solve(DenseMatrix a, Vec rhs) {
  std::vector<std::size_t> perm;
  lu_factor(a, perm);
  lu_apply(a, perm, rhs);
  return rhs;
}

KktSolution solve_kkt(const KktSystem& sys) {
  const std::size_t n = sys.hessian.rows();
  const std::size_t p = sys.eq_matrix.rows();
  if (sys.hessian.cols() != n) throw ValidationError("solve_kkt: Hessian not square");
  if (!sys.hessian.is_symmetric()) {
    throw NotSymmetricError("solve_kkt: Hessian fails the symmetry tolerance");
  }
  if (p > 0 && sys.eq_matrix.cols() != n) {
    throw ValidationError("solve_kkt: equality matrix has " +
                          std::to_string(sys.eq_matrix.cols()) + " columns, expected " +
                          std::to_string(n));
  }
  if (p > n) throw ValidationError("solve_kkt: more equality rows than variables");
  if (sys.gradient.size() != n) throw ValidationError("solve_kkt: gradient length mismatch");

  const DenseMatrix aug = assemble_augmented(sys);
  DenseMatrix lu = aug;
  std::vector<std::size_t> perm;
  lu_factor(lu, perm);

  Vec rhs(n + p, 0.0);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = -sys.gradient[i];

  Vec z = rhs;
  lu_apply(lu, perm, z);

  // One pass of iterative refinement tightens the residual for the larger
  // random systems without touching the factorization.
  Vec residual = rhs;
  for (std::size_t i = 0; i < n + p; ++i) {
    residual[i] -= kernels::dot(aug.row(i), z);
  }
  lu_apply(lu, perm, residual);
  for (std::size_t i = 0; i < n + p; ++i) z[i] += residual[i];

  KktSolution sol;
  sol.dx.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
  sol.w.assign(z.begin() + static_cast<std::ptrdiff_t>(n), z.end());
  return sol;
}

Vec symmetric_eigenvalues(const DenseMatrix& m) {
  if (!m.is_symmetric()) {
    throw NotSymmetricError("symmetric_eigenvalues: matrix fails the symmetry tolerance");
  }
  const std::size_t n = m.rows();
  DenseMatrix a = m;
  // Cyclic Jacobi: rotate away off-diagonal mass until it is negligible
  // relative to the matrix scale.
  double scale = norm_inf(a.entries());
  if (scale == 0.0) return Vec(n, 0.0);
  const double stop = 1e-15 * scale;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::abs(a(i, j)));
    }
    if (off <= stop) break;
    for (std::size_t pq = 0; pq < n; ++pq) {
      for (std::size_t q = pq + 1; q < n; ++q) {
        const std::size_t pp = pq;
        const double apq = a(pp, q);
        if (std::abs(apq) <= stop * 1e-2) continue;
        const double theta = (a(q, q) - a(pp, pp)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, pp);
          const double akq = a(k, q);
          a(k, pp) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(pp, k);
          const double aqk = a(q, k);
          a(pp, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vec eigs(n);
  for (std::size_t i = 0; i < n; ++i) eigs[i] = a(i, i);
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

bool is_positive_semidefinite(const DenseMatrix& m, double tol) {
  const Vec eigs = symmetric_eigenvalues(m);
  return eigs.empty() || eigs.front() >= -tol;
}

bool is_positive_semidefinite(const DenseMatrix& m) {
  const std::size_t n = m.rows();
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += m(i, i);
  const double tol = n == 0 ? 0.0 : 1e-9 * (std::abs(trace) / static_cast<double>(n));
  return is_positive_semidefinite(m, tol);
}

}  // namespace cvxkit
