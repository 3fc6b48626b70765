#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cvxkit/model.hpp"
#include "cvxkit/solver.hpp"

namespace cvxkit {

/// The quadratic/affine problem class carried by problem files:
/// minimize 0.5 x^T Q x + q^T x + c subject to G x <= h and A x = b.
/// Nonlinear constraints are reachable through the library API and the
/// dedicated geometry subcommands, not through this format.
struct ProblemFile {
  std::size_t n = 0;
  DenseMatrix q_matrix;  // n x n, symmetric PSD
  Vec q_vector;          // length n
  double constant = 0.0;
  std::optional<DenseMatrix> ineq_matrix;  // G, rows of g^T
  std::optional<Vec> ineq_rhs;             // h
  std::optional<DenseMatrix> eq_matrix;    // A
  std::optional<Vec> eq_rhs;               // b
  std::optional<Vec> start;
};

/// Parses the JSON problem document. Unknown fields are rejected at every
/// level. Throws ParseError on malformed input and ValidationError on an
/// asymmetric or non-PSD Q, dimension mismatches, or a rank-deficient A.
ProblemFile parse_problem_file(const std::string& text);

/// Inverse of parse_problem_file; parse(serialize(pf)) reproduces every
/// matrix bit-for-bit.
std::string serialize_problem_file(const ProblemFile& pf);

/// Builds the runtime problem from a parsed file.
ConvexProblem build_problem(const ProblemFile& pf);

/// Point-list files: one point per line, coordinates comma-separated.
std::vector<Vec> parse_point_list(const std::string& text);

/// Emits the trace as CSV with header
///   outer,t,inner,f0,barrier,step,gap_bound
/// and returns the number of bytes written. Numbers are printed with 9
/// significant digits, '.' radix, no locale dependence.
std::size_t write_trace(const std::vector<TraceRow>& rows, std::ostream& sink);

/// Formats one number with 9 significant digits.
std::string format_number(double v);

/// Entry point behind the cvxkit binary; exposed for testing.
/// Exit codes: 0 success, 1 infeasible, 2 solver failure, 3 input error.
int run_cli(int argc, const char* const* argv);

}  // namespace cvxkit
