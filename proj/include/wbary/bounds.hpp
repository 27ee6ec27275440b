#pragma once

#include "wbary/measures.hpp"
#include "wbary/ot.hpp"

namespace wbary {

// Per-atom image of one averaging step before any merging: row k of
// mapped_points is where the atom at source_points row k (mass
// source_masses[k]) was sent.
struct GStepDetail {
  Matrix source_points;
  Vector source_masses;
  Matrix mapped_points;
};

// sum_{i<j} lambda_i lambda_j costs(i, j). The matrix must be symmetric
// with zero diagonal (pairwise W_p^p values); a lower bound on the optimal
// barycenter objective.
double pairwise_lower_bound(const Matrix& pairwise_costs, const Weights& weights);

// A-priori multipliers for the objective of a plain initialization:
// 1 / lambda_j for the single measure mu^j, 2 for the mixture.
double init_bound_single(const Weights& weights, Index j);
double init_bound_mixture();

// sum_i lambda_i sum_{k,l} pi^i_{k,l} ||m_k - x^i_l||^p, the transport cost
// of the mapped atoms under the plans that produced them. Upper-bounds
// Psi_p of the mapped measure for any feasible plans.
double g_step_transport_cost(const GStepDetail& detail, const std::vector<TransportPlan>& plans,
                             const Problem& problem);

struct AdaptedBound {
  double eta = 1.0;      // reported value (floored at 1, p=2 capped at 2)
  double raw = 1.0;      // unclamped ratio, kept for diagnostics
  bool degenerate = false;  // lower bound was zero (identical inputs)
};

// Problem-adapted a-posteriori multiplier: g_step_transport_cost divided by
// the pairwise lower bound. Sound for both p.
AdaptedBound adapted_bound_general(const GStepDetail& detail,
                                   const std::vector<TransportPlan>& plans,
                                   const Problem& problem, const Matrix& pairwise_costs);
AdaptedBound adapted_bound_general(const GStepDetail& detail,
                                   const std::vector<TransportPlan>& plans,
                                   const Problem& problem, double lower_bound);

// p = 2 specialization, evaluated from the mass-weighted squared atom
// displacements alone: 2 - sum_k nu_k ||m_k - y_k||^2 / lower_bound.
AdaptedBound adapted_bound_p2(const Vector& masses, const Vector& squared_displacements,
                              const Matrix& pairwise_costs, const Weights& weights);
AdaptedBound adapted_bound_p2(const Vector& masses, const Vector& squared_displacements,
                              double lower_bound);

// Everything the CLI reports about certified error bounds.
struct BoundReport {
  double lower_bound = 0.0;
  double eta_worst_case = 2.0;
  double eta_adapted = 1.0;
  double eta_adapted_raw = 1.0;
  bool degenerate = false;
  Matrix pairwise_costs;  // N x N when the run computed it, else empty
};

}  // namespace wbary
