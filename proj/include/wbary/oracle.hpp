#pragma once

#include "wbary/measures.hpp"
#include "wbary/ot.hpp"

#include <utility>

namespace wbary {

// Verification-only brute force solvers. Everything here favors a
// termination guarantee over speed and is meant for toy instances.

// Basic solution of  min c'x  s.t.  A x = b, x >= 0.
struct LpSolution {
  Vector x;
  double objective = 0.0;
  long pivots = 0;
};

// Dense two-phase primal simplex with Bland's pivoting rule. Redundant
// equality rows are tolerated (their artificials stay basic at zero).
// Throws SolverError on infeasibility or a blown pivot budget.
LpSolution solve_lp(const Matrix& A, const Vector& b, const Vector& c, long max_pivots = 0);

// Optimal transport as the dense LP over all n1 x n2 coupling entries.
// Guard: n1 * n2 <= 10000. The optimal cost matches the network simplex;
// the plan itself may differ when optima are not unique.
std::pair<TransportPlan, double> solve_ot_lp(const DiscreteMeasure& mu,
                                             const DiscreteMeasure& nu, CostExponent p);

// Exact barycenter of a small instance. Enumerates all support-index tuples
// (guard: prod n_i <= 5000), places the per-tuple aggregation point (the
// weighted mean for p = 2, the weighted geometric median for p = 1, which
// additionally requires d <= 2), and solves the joint LP over tuple masses
// with the per-measure marginal constraints. The returned measure comes from
// a basic solution, so its support satisfies  #supp <= sum n_i - N + 1;
// the reported objective is recomputed with exact OT solves.
std::pair<DiscreteMeasure, double> exact_barycenter(const Problem& problem);

// Best objective over barycenters restricted to the given candidate support:
// the LP over N couplings sharing their candidate-side marginal. Used to
// cross-check exact_barycenter (p = 2) and to grid-verify the p = 1 oracle.
double fixed_support_barycenter_lp(const Problem& problem, const Matrix& candidates);

}  // namespace wbary
