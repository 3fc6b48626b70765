#pragma once

#include <cstddef>
#include <vector>

#include "cvxkit/barrier.hpp"
#include "cvxkit/newton.hpp"

namespace cvxkit {

struct BarrierConfig {
  double t0 = 10.0;         // initial barrier parameter, > 0
  double u = 10.0;          // update factor, > 1
  double eps = 1e-6;        // target gap, > 0
  NewtonOptions inner;      // centering solve configuration
  std::size_t max_outer = 64;  // safeguard on the number of centerings
};

enum class SolveStatus { Optimal, MaxIterations, Infeasible };

const char* to_string(SolveStatus status);

struct OuterRecord {
  double t;
  std::size_t newton_iterations;
  double objective;   // f0 at the center
  double gap_bound;   // m / t
};

/// One row per Newton iteration across all centerings; the data behind the
/// CSV trace emitted by the CLI.
struct TraceRow {
  std::size_t outer;  // 1-based centering index
  double t;
  std::size_t inner;  // 1-based Newton iteration within the centering
  double f0;
  double barrier;     // phi(x)
  double step;
  double gap_bound;   // m / t
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIterations;
  Vec x;
  DualPoint dual;
  std::vector<OuterRecord> outer;
  std::size_t total_centerings = 0;
  std::size_t total_newton = 0;
};

/// Single centering at t = m/eps. Cheap and adequate for moderate eps;
/// expected to stall or stop short of the optimum when eps is tiny, since
/// t*f0 then swamps the barrier term. With m = 0 the barrier is skipped
/// and this is one equality-constrained Newton solve of f0 itself.
/// Requires x0 strictly feasible and equality-feasible.
SolveReport solve_preliminary(const ConvexProblem& prob, const Vec& x0, double eps,
                              const NewtonOptions& inner = {},
                              std::vector<TraceRow>* trace = nullptr);

/// The full method: centerings at t = t0, u*t0, u^2*t0, ... with each one
/// warm-started from the previous center, quitting once m/t < eps. The
/// returned dual point certifies f0(x) - p* <= m/t_final on Optimal.
SolveReport solve_barrier(const ConvexProblem& prob, const Vec& x0, const BarrierConfig& cfg = {},
                          std::vector<TraceRow>* trace = nullptr,
                          const StepObserver& observer = {});

/// Number of centerings after the initial one required to reach eps:
/// ceil(log(m / (eps t0)) / log u), clamped at 0 when m/t0 < eps already.
std::size_t predict_outer_iterations(std::size_t m, double eps, double t0, double u);

struct PhaseOneResult {
  bool feasible;
  Vec x;                    // strictly feasible point when feasible
  double pbar_star_lower;   // certified lower bound on the auxiliary
                            // optimum when infeasible (>= 0)
};

/// Finds a strictly feasible point or certifies that none exists, by
/// minimizing s subject to f_i(x) <= s over (x, s), starting from
/// s0 = max_i f_i(x0) + 1. Exits early with Feasible the moment any
/// iterate reaches s < 0; declares Infeasible only when the certified
/// bound proves p_bar* >= -eps. Requires x0 inside every f_i domain and
/// equality-feasible; already strictly feasible starts short-circuit.
/// Throws SolverFailureError when the auxiliary solve fails uncertified.
PhaseOneResult phase1(const ConvexProblem& prob, const Vec& x0, const BarrierConfig& cfg = {});

}  // namespace cvxkit
