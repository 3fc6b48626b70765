#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cvxkit/errors.hpp"

namespace cvxkit {

using Vec = std::vector<double>;

/// Dense row-major matrix. Small problems only; no sparse storage.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, Vec entries);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) { return {entries_.data() + i * cols_, cols_}; }

  const Vec& entries() const noexcept { return entries_; }

  /// |M_ij - M_ji| <= tol * (1 + |M_ij|) for all i, j.
  bool is_symmetric(double tol = 1e-12) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vec entries_;
};

/// y = M x.
Vec matvec(const DenseMatrix& m, std::span<const double> x);

/// y = M^T x.
Vec matvec_transposed(const DenseMatrix& m, std::span<const double> x);

double norm_inf(std::span<const double> v);
double norm2(std::span<const double> v);

/// One Newton step's linear system: the (n+p) x (n+p) block equation
///
///   [ H  A^T ] [ dx ]   [ -g ]
///   [ A   0  ] [ w  ] = [  0 ]
///
/// with H the n x n symmetric Hessian of the working objective, A the
/// p x n equality matrix (p possibly 0) and g the working gradient.
struct KktSystem {
  DenseMatrix hessian;    // n x n, symmetric
  DenseMatrix eq_matrix;  // p x n, p <= n
  Vec gradient;           // length n
};

struct KktSolution {
  Vec dx;  // length n
  Vec w;   // length p, equality multipliers
};

/// Solves the block system by factoring the full augmented matrix with
/// partial pivoting (robust to H singular on the nullspace of A, which
/// happens for barrier Hessians of problems with affine objectives).
/// Throws NotSymmetricError when H fails the symmetry check and
/// SingularKktError when a pivot underflows 1e-12 times the largest
/// absolute entry of the augmented matrix.
KktSolution solve_kkt(const KktSystem& sys);

/// Eigenvalues of a symmetric matrix via cyclic Jacobi sweeps, ascending.
Vec symmetric_eigenvalues(const DenseMatrix& m);

/// True iff every eigenvalue of m is >= -tol. Throws NotSymmetricError
/// when m is not symmetric within the DenseMatrix tolerance.
bool is_positive_semidefinite(const DenseMatrix& m, double tol);

/// Scale-aware default tolerance: 1e-9 * |trace| / dimension.
bool is_positive_semidefinite(const DenseMatrix& m);

/// Plain dense solve of a general square system via LU with partial
/// pivoting. Used for equality-feasible projections and small utility
/// solves; solve_kkt goes through the same factorization core.
Vec lu_solve(DenseMatrix a, Vec rhs);

}  // namespace cvxkit
