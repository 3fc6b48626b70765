#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cvxkit/linalg.hpp"

namespace cvxkit {

/// A twice-differentiable real-valued function of n variables together
/// with a predicate describing its (open) domain. Objectives, inequality
/// constraints and barrier compositions all implement this interface.
/// Implementations are immutable and safe to share across threads.
class ScalarField {
 public:
  virtual ~ScalarField() = default;

  virtual std::size_t dimension() const noexcept = 0;
  virtual double value(std::span<const double> x) const = 0;
  virtual Vec gradient(std::span<const double> x) const = 0;
  virtual DenseMatrix hessian(std::span<const double> x) const = 0;

  /// Open-set membership; gradient/hessian may only be queried where true.
  virtual bool in_domain(std::span<const double> x) const { return x.size() == dimension(); }
};

using FieldPtr = std::shared_ptr<const ScalarField>;

struct Evaluation {
  double value;
  Vec gradient;
  DenseMatrix hessian;
};

/// Bundles the three queries, checking the domain first.
/// Throws OutOfDomainError when the predicate fails.
Evaluation evaluate(const ScalarField& f, std::span<const double> x);

struct DerivativeReport {
  double max_gradient_error;  // max_i |analytic_i - fd_i| / (1 + |analytic_i|)
  double max_hessian_error;   // same, entrywise over the Hessian
  std::size_t probe_count;
};

/// Compares the analytic gradient against central differences of the value
/// and the analytic Hessian against central differences of the gradient,
/// all with step h. Throws OutOfDomainError if any probe x +- h e_i leaves
/// the domain.
DerivativeReport check_derivatives(const ScalarField& f, std::span<const double> x, double h);

/// Central-difference sweet spot in double precision: 1e-5 * (1 + |x|_inf).
double default_fd_step(std::span<const double> x);

/// f(x) = 0.5 x^T Q x + q^T x + c with Q symmetric (the stored Hessian).
class QuadraticField final : public ScalarField {
 public:
  QuadraticField(DenseMatrix q_matrix, Vec q_vector, double constant);

  std::size_t dimension() const noexcept override { return q_vector_.size(); }
  double value(std::span<const double> x) const override;
  Vec gradient(std::span<const double> x) const override;
  DenseMatrix hessian(std::span<const double> x) const override;

  const DenseMatrix& q_matrix() const noexcept { return q_matrix_; }

 private:
  DenseMatrix q_matrix_;
  Vec q_vector_;
  double constant_;
};

/// f(x) = g^T x - h; the storage form of the affine inequality g^T x <= h.
class AffineField final : public ScalarField {
 public:
  AffineField(Vec coeffs, double offset);

  std::size_t dimension() const noexcept override { return coeffs_.size(); }
  double value(std::span<const double> x) const override;
  Vec gradient(std::span<const double> x) const override;
  DenseMatrix hessian(std::span<const double> x) const override;

 private:
  Vec coeffs_;
  double offset_;
};

/// Over variables (x, r) in R^{n+1}: f(x, r) = |a - x|_2 - r, defined on
/// the open set x != a where the norm is differentiable.
class NormDistanceField final : public ScalarField {
 public:
  explicit NormDistanceField(Vec anchor);

  std::size_t dimension() const noexcept override { return anchor_.size() + 1; }
  double value(std::span<const double> x) const override;
  Vec gradient(std::span<const double> x) const override;
  DenseMatrix hessian(std::span<const double> x) const override;
  bool in_domain(std::span<const double> x) const override;

 private:
  Vec anchor_;
};

/// Over variables (x, s) in R^{n+1}: f(x, s) = base(x) - s. The auxiliary
/// constraint form used by the feasibility phase.
class SlackShiftedField final : public ScalarField {
 public:
  explicit SlackShiftedField(FieldPtr base);

  std::size_t dimension() const noexcept override { return base_->dimension() + 1; }
  double value(std::span<const double> x) const override;
  Vec gradient(std::span<const double> x) const override;
  DenseMatrix hessian(std::span<const double> x) const override;
  bool in_domain(std::span<const double> x) const override;

 private:
  FieldPtr base_;
};

/// Standard-form problem: minimize objective subject to every inequality
/// field <= 0 and eq_matrix x = eq_rhs. Construction validates that all
/// dimensions agree, that the equality matrix has full row rank, and that
/// p < n whenever p > 0. Immutable after construction.
class ConvexProblem {
 public:
  ConvexProblem(FieldPtr objective, std::vector<FieldPtr> inequalities,
                DenseMatrix eq_matrix, Vec eq_rhs);

  std::size_t dimension() const noexcept;
  const ScalarField& objective() const noexcept { return *objective_; }
  FieldPtr objective_ptr() const noexcept { return objective_; }
  const std::vector<FieldPtr>& inequalities() const noexcept { return inequalities_; }
  std::size_t num_inequalities() const noexcept { return inequalities_.size(); }
  const DenseMatrix& eq_matrix() const noexcept { return eq_matrix_; }
  const Vec& eq_rhs() const noexcept { return eq_rhs_; }

  /// Index of the first inequality with f_i(x) >= 0 or x outside its
  /// domain; -1 when x is strictly feasible w.r.t. the inequalities.
  long first_violated(std::span<const double> x) const;

  /// All f_i(x) < 0, every domain holds (equalities not checked here).
  bool strictly_feasible(std::span<const double> x) const;

  /// |eq_matrix x - eq_rhs|_inf <= tol * (1 + |eq_rhs|_inf).
  bool satisfies_equalities(std::span<const double> x, double tol = 1e-8) const;

  double max_inequality(std::span<const double> x) const;

 private:
  FieldPtr objective_;
  std::vector<FieldPtr> inequalities_;
  DenseMatrix eq_matrix_;
  Vec eq_rhs_;
};

struct CatalogParams {
  std::vector<Vec> points;  // "chebyshev": the k points to enclose
};

/// Named problems used across the test and acceptance suites.
///   "example6"  - the 3-variable quadratic with three affine inequalities
///                 and one equality.
///   "chebyshev" - variables (x, r), objective r, constraints
///                 |a_i - x|_2 - r <= 0 built from params.points.
/// Throws UnknownNameError / BadParamsError.
ConvexProblem catalog_problem(const std::string& name, const CatalogParams& params = {});

}  // namespace cvxkit
