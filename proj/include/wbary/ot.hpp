#pragma once

#include "wbary/measures.hpp"

#include <vector>

namespace wbary {

struct PlanEntry {
  Index row = 0;
  Index col = 0;
  double mass = 0.0;
};

// Sparse coupling between a source and a target measure. Entries carry
// strictly positive mass, are sorted by (row, col), and satisfy the marginal
// sums of the measures the plan was built for (within 1e-9). Plans produced
// by the exact solver have at most n1 + n2 - 1 entries.
struct TransportPlan {
  Index n_source = 0;
  Index n_target = 0;
  std::vector<PlanEntry> entries;
  CostExponent p = CostExponent::p2;
};

struct OtSolution {
  TransportPlan plan;
  double cost = 0.0;
  // Dual potentials: u[k] + v[l] <= c(k, l) everywhere, with equality on the
  // support of the plan. Certifies optimality.
  Vector source_potentials;
  Vector target_potentials;
  long pivots = 0;
};

struct OtOptions {
  long max_pivots = 0;  // 0 picks an instance-sized budget
};

// Entry (k, l) holds ||x_k - y_l||^p.
Matrix cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostExponent p);

// Exact optimal transport between two discrete measures: network simplex on
// the bipartite transportation graph, block-search pricing with a fixed
// block size (deterministic). Throws SolverError with the pivot count if the
// budget is exhausted.
OtSolution solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostExponent p,
                    const OtOptions& options = {});

// Matrix-level entry point; supply and demand totals may differ by at most
// 1e-9 and are rescaled to match.
OtSolution solve_transportation(const Matrix& cost, Vector supply, Vector demand,
                                CostExponent p_tag, const OtOptions& options = {});

TransportPlan transpose_plan(const TransportPlan& plan);

// Identity coupling of a measure with itself.
TransportPlan diagonal_plan(const DiscreteMeasure& mu, CostExponent p);

double plan_cost(const TransportPlan& plan, const Matrix& cost);

Vector plan_row_sums(const TransportPlan& plan);
Vector plan_col_sums(const TransportPlan& plan);

// Checks the plan couples (mu, nu) with marginal error at most tol.
void check_plan_marginals(const TransportPlan& plan, const DiscreteMeasure& mu,
                          const DiscreteMeasure& nu, double tol = 1e-9);

// Psi_p(nu) = sum_i lambda_i W_p^p(nu, mu^i), every term solved exactly.
double wasserstein_objective(const DiscreteMeasure& nu, const Problem& problem,
                             const OtOptions& options = {});

}  // namespace wbary
