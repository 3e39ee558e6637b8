#pragma once

#include <cstdint>
#include <optional>

#include "dataplace/objective.hpp"

namespace dataplace {

// Feasible point of the dual of the LP relaxation, in the demand-scaled
// convention: the raw dual variable of client (j,l) is w(j,l) * beta(j,l).
// Clients with zero demand have beta pinned to 0 (their raw variable is
// weighted by zero, and leaving them free adds an unbounded null direction).
// The third dual block is kept in reduced form u(i,j,l) = w(j,l) *
// (beta(j,l) - c(i,j))^+ rather than stored.
struct DualSolution {
  Matrix beta;   // n x k, rows are clients j, columns resources l
  Vector alpha;  // n, one per item (agent cache slot)
  double objective = 0.0;  // sum w beta - sum alpha

  double u_var(const UnitInstance& inst, int i, int j, int l) const;
};

struct DualEvaluation {
  double objective = 0.0;
  Vector alpha;                 // alpha_i = (max_l bid(i,l))^+
  std::vector<int> assignment;  // y: item -> argmax resource, -1 if all
                                // bids are nonpositive
};

// Exact inner minimization of the max-min form of the dual: per item i the
// unclamped bid toward resource l is sum_j w(j,l)(beta(j,l) - c(i,j))^+ -
// f(i,l); alpha picks the clamped max and y the argmax (smallest index on
// ties) wherever alpha is positive. Integral y is optimal here because the
// inner constraint polytope is integral. Negative beta entries are rejected.
DualEvaluation eval_dual(const UnitInstance& inst, const Matrix& beta);

// Max over (i,l) of sum_j w(j,l)(beta(j,l) - c(i,j))^+ - f(i,l) - alpha_i,
// and of negative variable values. Feasible solutions are <= 0 up to
// rounding.
double dual_feasibility_residual(const UnitInstance& inst,
                                 const DualSolution& dual);

// One supergradient of the concave piecewise-linear dual objective at beta:
// entry (j,l) = w(j,l) (1 - sum_{i: y_i = l} [beta(j,l) > c(i,j)]) with y
// from eval_dual. The strict inequality picks one element of the
// superdifferential at kinks; ascent validity follows from concavity
// regardless of the selection.
Matrix dual_subgradient(const UnitInstance& inst, const Matrix& beta);

struct DualSolveConfig {
  int max_iters = 50'000;
  // Diminishing step a / (b + t); a <= 0 selects
  // 0.1 * (b + 1) * (max kink radius) / ||initial supergradient||_inf.
  double step_a = 0.0;
  double step_b = 10.0;
  double tol = 1e-6;  // relative stagnation threshold for tolerance_met
  std::uint64_t seed = 0;
  // Periodically evaluate the distance-profile candidate beta(j,l) =
  // d(j, Y^l) rebuilt from the incumbent assignment, and iterate that map to
  // a fixed point when it improves. Pure best-iterate bookkeeping: every
  // candidate is scored by eval_dual and kept only if better.
  bool polish = true;
  std::optional<double> reference_value;
};

struct DualSolveResult {
  DualSolution solution;        // alpha recomputed from beta, hence feasible
  std::vector<int> assignment;  // y consistent with solution.beta
  bool tolerance_met = false;
  int iterations = 0;
  double feasibility_residual = 0.0;
  std::optional<double> gap_vs_reference;
  bool polish_fixed_point = false;  // candidate map reached y(beta(y)) = y
};

// Projected supergradient ascent over beta >= 0 (zero-demand coordinates
// pinned to 0) with best-iterate tracking. tolerance_met means the best
// value improved by at most tol (relative) over the last quarter of the
// iteration budget, or the polish candidates closed on a fixed point.
DualSolveResult solve_dual(const UnitInstance& inst,
                           const DualSolveConfig& cfg = {});

// The feasible dual point read off a pure Nash equilibrium x:
//   beta(j,l) = d(j, X^l) (0 where w(j,l) = 0),
//   alpha_i   = (sum_j w(j,x_i)(d(j, X^{x_i} - i) - c(i,j))^+ - f(i,x_i))^+.
// The clamp keeps alpha nonnegative when fees dominate; it can only shrink
// the objective, which weak duality still bounds by the optimum. Throws
// std::invalid_argument naming an improving move if x is not an equilibrium.
DualSolution ne_dual_certificate(const UnitInstance& inst,
                                 const Allocation& ne);

struct NeQualityReport {
  double phi_ne = 0.0;
  std::optional<double> phi_opt;
  // Potential with player j's cache evacuated: j leaves X^{x_j} in every
  // distance term. The first variant drops the evacuated fee f(j, x_j),
  // the second keeps it; both appear because the bound is only proof-backed
  // with the fee kept.
  std::vector<double> phi_evacuated;
  std::vector<double> phi_evacuated_fee_kept;
  std::optional<double> bound;           // (phi_opt + sum evacuated)/(n+1)
  std::optional<double> bound_fee_kept;
  std::optional<bool> bound_holds;           // phi_ne <= bound + 1e-9
  std::optional<bool> bound_fee_kept_holds;
  double certificate_objective = 0.0;
};

NeQualityReport ne_quality_bound(const UnitInstance& inst,
                                 const Allocation& ne,
                                 std::optional<double> phi_opt);

}  // namespace dataplace
