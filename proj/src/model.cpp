#include "cvxkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cvxkit/kernels.hpp"

namespace cvxkit {

Evaluation evaluate(const ScalarField& f, std::span<const double> x) {
  if (x.size() != f.dimension() || !f.in_domain(x)) {
    throw OutOfDomainError("evaluate: point outside the field's domain");
  }
  return Evaluation{f.value(x), f.gradient(x), f.hessian(x)};
}

double default_fd_step(std::span<const double> x) { return 1e-5 * (1.0 + norm_inf(x)); }

DerivativeReport check_derivatives(const ScalarField& f, std::span<const double> x, double h) {
  const std::size_t n = f.dimension();
  if (x.size() != n || !f.in_domain(x)) {
    throw OutOfDomainError("check_derivatives: center point outside the domain");
  }
  if (!(h > 0.0)) throw BadParamsError("check_derivatives: step must be positive");

  Vec probe(x.begin(), x.end());
  auto probe_value = [&](std::size_t i, double delta) {
    probe[i] = x[i] + delta;
    if (!f.in_domain(probe)) {
      throw OutOfDomainError("check_derivatives: probe point exits the domain");
    }
    const double v = f.value(probe);
    probe[i] = x[i];
    return v;
  };
  auto probe_gradient = [&](std::size_t i, double delta) {
    probe[i] = x[i] + delta;
    if (!f.in_domain(probe)) {
      throw OutOfDomainError("check_derivatives: probe point exits the domain");
    }
    Vec g = f.gradient(probe);
    probe[i] = x[i];
    return g;
  };

  const Vec grad = f.gradient(x);
  const DenseMatrix hess = f.hessian(x);

  double grad_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fd = (probe_value(i, h) - probe_value(i, -h)) / (2.0 * h);
    grad_err = std::max(grad_err, std::abs(grad[i] - fd) / (1.0 + std::abs(grad[i])));
  }

  // Hessian columns against central differences of the analytic gradient.
  double hess_err = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Vec gp = probe_gradient(j, h);
    const Vec gm = probe_gradient(j, -h);
    for (std::size_t i = 0; i < n; ++i) {
      const double fd = (gp[i] - gm[i]) / (2.0 * h);
      const double a = hess(i, j);
      hess_err = std::max(hess_err, std::abs(a - fd) / (1.0 + std::abs(a)));
    }
  }

  return DerivativeReport{grad_err, hess_err, 4 * n};
}

// --- concrete fields ---------------------------------------------------

QuadraticField::QuadraticField(DenseMatrix q_matrix, Vec q_vector, double constant)
    : q_matrix_(std::move(q_matrix)), q_vector_(std::move(q_vector)), constant_(constant) {
  if (q_matrix_.rows() != q_vector_.size() || q_matrix_.cols() != q_vector_.size()) {
    throw ValidationError("QuadraticField: Q must be n x n with q of length n");
  }
  if (!q_matrix_.is_symmetric()) {
    throw NotSymmetricError("QuadraticField: Q fails the symmetry tolerance");
  }
}

double QuadraticField::value(std::span<const double> x) const {
  const Vec qx = matvec(q_matrix_, x);
  return 0.5 * kernels::dot(qx, x) + kernels::dot(q_vector_, x) + constant_;
}

Vec QuadraticField::gradient(std::span<const double> x) const {
  Vec g = matvec(q_matrix_, x);
  kernels::axpy(1.0, q_vector_, g);
  return g;
}

DenseMatrix QuadraticField::hessian(std::span<const double>) const { return q_matrix_; }

AffineField::AffineField(Vec coeffs, double offset)
    : coeffs_(std::move(coeffs)), offset_(offset) {}

double AffineField::value(std::span<const double> x) const {
  return kernels::dot(coeffs_, x) - offset_;
}

Vec AffineField::gradient(std::span<const double>) const { return coeffs_; }

DenseMatrix AffineField::hessian(std::span<const double>) const {
  return DenseMatrix(coeffs_.size(), coeffs_.size());
}

NormDistanceField::NormDistanceField(Vec anchor) : anchor_(std::move(anchor)) {
  if (anchor_.empty()) throw BadParamsError("NormDistanceField: empty anchor");
}

double NormDistanceField::value(std::span<const double> z) const {
  const std::size_t n = anchor_.size();
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = z[i] - anchor_[i];
    d2 += diff * diff;
  }
  return std::sqrt(d2) - z[n];
}

Vec NormDistanceField::gradient(std::span<const double> z) const {
  const std::size_t n = anchor_.size();
  Vec g(n + 1, 0.0);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = z[i] - anchor_[i];
    d2 += diff * diff;
  }
  const double d = std::sqrt(d2);
  for (std::size_t i = 0; i < n; ++i) g[i] = (z[i] - anchor_[i]) / d;
  g[n] = -1.0;
  return g;
}

DenseMatrix NormDistanceField::hessian(std::span<const double> z) const {
  const std::size_t n = anchor_.size();
  DenseMatrix h(n + 1, n + 1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = z[i] - anchor_[i];
    d2 += diff * diff;
  }
  const double d = std::sqrt(d2);
  // x-block: (I - u u^T) / d with u the unit vector from the anchor.
  for (std::size_t i = 0; i < n; ++i) {
    const double ui = (z[i] - anchor_[i]) / d;
    for (std::size_t j = 0; j < n; ++j) {
      const double uj = (z[j] - anchor_[j]) / d;
      h(i, j) = ((i == j ? 1.0 : 0.0) - ui * uj) / d;
    }
  }
  return h;
}

bool NormDistanceField::in_domain(std::span<const double> z) const {
  if (z.size() != dimension()) return false;
  for (std::size_t i = 0; i < anchor_.size(); ++i) {
    if (z[i] != anchor_[i]) return true;
  }
  return false;
}

SlackShiftedField::SlackShiftedField(FieldPtr base) : base_(std::move(base)) {
  if (!base_) throw BadParamsError("SlackShiftedField: null base field");
}

double SlackShiftedField::value(std::span<const double> z) const {
  const std::size_t n = base_->dimension();
  return base_->value(z.subspan(0, n)) - z[n];
}

Vec SlackShiftedField::gradient(std::span<const double> z) const {
  const std::size_t n = base_->dimension();
  Vec g = base_->gradient(z.subspan(0, n));
  g.push_back(-1.0);
  return g;
}

DenseMatrix SlackShiftedField::hessian(std::span<const double> z) const {
  const std::size_t n = base_->dimension();
  const DenseMatrix hb = base_->hessian(z.subspan(0, n));
  DenseMatrix h(n + 1, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) h(i, j) = hb(i, j);
  }
  return h;
}

bool SlackShiftedField::in_domain(std::span<const double> z) const {
  return z.size() == dimension() && base_->in_domain(z.subspan(0, base_->dimension()));
}

// --- problem -----------------------------------------------------------

namespace {

// Row rank of a p x n matrix via elimination with partial pivoting.
std::size_t row_rank(DenseMatrix a) {
  const std::size_t p = a.rows();
  const std::size_t n = a.cols();
  if (p == 0) return 0;
  const double thresh = 1e-12 * std::max(1e-300, norm_inf(a.entries()));
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < p; ++col) {
    std::size_t piv = rank;
    double best = std::abs(a(rank, col));
    for (std::size_t i = rank + 1; i < p; ++i) {
      if (std::abs(a(i, col)) > best) {
        best = std::abs(a(i, col));
        piv = i;
      }
    }
    if (best <= thresh) continue;
    if (piv != rank) {
      auto r0 = a.row(rank);
      auto r1 = a.row(piv);
      std::swap_ranges(r0.begin(), r0.end(), r1.begin());
    }
    for (std::size_t i = rank + 1; i < p; ++i) {
      const double factor = a(i, col) / a(rank, col);
      if (factor != 0.0) {
        kernels::axpy(-factor, a.row(rank).subspan(col), a.row(i).subspan(col));
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace

ConvexProblem::ConvexProblem(FieldPtr objective, std::vector<FieldPtr> inequalities,
                             DenseMatrix eq_matrix, Vec eq_rhs)
    : objective_(std::move(objective)),
      inequalities_(std::move(inequalities)),
      eq_matrix_(std::move(eq_matrix)),
      eq_rhs_(std::move(eq_rhs)) {
  if (!objective_) throw ValidationError("ConvexProblem: null objective");
  const std::size_t n = objective_->dimension();
  for (std::size_t i = 0; i < inequalities_.size(); ++i) {
    if (!inequalities_[i] || inequalities_[i]->dimension() != n) {
      throw ValidationError("ConvexProblem: inequality " + std::to_string(i) +
                            " has mismatched dimension");
    }
  }
  const std::size_t p = eq_matrix_.rows();
  if (eq_rhs_.size() != p) {
    throw ValidationError("ConvexProblem: equality rhs length does not match rows");
  }
  if (p > 0) {
    if (eq_matrix_.cols() != n) {
      throw ValidationError("ConvexProblem: equality matrix has wrong column count");
    }
    if (p >= n) {
      throw ValidationError("ConvexProblem: requires p < n when equality rows are present");
    }
    if (row_rank(eq_matrix_) != p) {
      throw ValidationError("ConvexProblem: equality matrix is rank deficient");
    }
  }
}

std::size_t ConvexProblem::dimension() const noexcept { return objective_->dimension(); }

long ConvexProblem::first_violated(std::span<const double> x) const {
  for (std::size_t i = 0; i < inequalities_.size(); ++i) {
    const auto& f = *inequalities_[i];
    if (!f.in_domain(x) || f.value(x) >= 0.0) return static_cast<long>(i);
  }
  return -1;
}

bool ConvexProblem::strictly_feasible(std::span<const double> x) const {
  return objective_->in_domain(x) && first_violated(x) < 0;
}

bool ConvexProblem::satisfies_equalities(std::span<const double> x, double tol) const {
  if (eq_matrix_.rows() == 0) return true;
  Vec r = matvec(eq_matrix_, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= eq_rhs_[i];
  return norm_inf(r) <= tol * (1.0 + norm_inf(eq_rhs_));
}

double ConvexProblem::max_inequality(std::span<const double> x) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& f : inequalities_) worst = std::max(worst, f->value(x));
  return worst;
}

// --- catalog -----------------------------------------------------------

ConvexProblem catalog_problem(const std::string& name, const CatalogParams& params) {
  if (name == "example6") {
    DenseMatrix q(3, 3, {2, -1, 0, -1, 2, -1, 0, -1, 2});
    auto objective = std::make_shared<QuadraticField>(std::move(q), Vec{0, 0, 0}, 0.0);
    std::vector<FieldPtr> ineqs = {
        std::make_shared<AffineField>(Vec{1, 1, 0}, 200.0),
        std::make_shared<AffineField>(Vec{1, 5, 10}, 8000.0),
        std::make_shared<AffineField>(Vec{0, -10, -1}, 5000.0),
    };
    DenseMatrix eq(1, 3, {1, 0, 1});
    return ConvexProblem(objective, std::move(ineqs), std::move(eq), Vec{400.0});
  }
  if (name == "chebyshev") {
    if (params.points.empty()) {
      throw BadParamsError("catalog_problem: chebyshev needs at least one point");
    }
    const std::size_t n = params.points.front().size();
    if (n == 0) throw BadParamsError("catalog_problem: chebyshev points must be nonempty");
    std::vector<FieldPtr> ineqs;
    ineqs.reserve(params.points.size());
    for (const auto& p : params.points) {
      if (p.size() != n) {
        throw BadParamsError("catalog_problem: chebyshev points have mixed dimensions");
      }
      ineqs.push_back(std::make_shared<NormDistanceField>(p));
    }
    Vec obj_coeffs(n + 1, 0.0);
    obj_coeffs[n] = 1.0;  // minimize the radius variable
    auto objective = std::make_shared<AffineField>(std::move(obj_coeffs), 0.0);
    return ConvexProblem(objective, std::move(ineqs), DenseMatrix(0, n + 1), Vec{});
  }
  throw UnknownNameError("catalog_problem: unknown problem \"" + name + "\"");
}

}  // namespace cvxkit
