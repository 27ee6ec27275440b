#pragma once

#include "wbary/bounds.hpp"
#include "wbary/measures.hpp"
#include "wbary/ot.hpp"

#include <utility>
#include <vector>

namespace wbary {

enum class Method { Reference, Pairwise, FixedPoint, ExactOracle };

// Which cost the transport plans are solved under. SquaredEuclidean is the
// swap variant for p = 1: plans under c_2, atom placement still by medians.
enum class PlanCost { MatchP, SquaredEuclidean };

struct BarycenterOptions {
  double eps = 1e-6;  // multiplicative accuracy of the geometric medians
  PlanCost plan_cost = PlanCost::MatchP;
  OtOptions ot;
};

struct BarycenterResult {
  DiscreteMeasure measure;
  double objective = 0.0;  // Psi_p of measure, from exact OT solves
  Method method = Method::Pairwise;
  CostExponent p = CostExponent::p2;
  int ref_index = -1;  // reference runs only
  double eps = 0.0;
  BoundReport bounds;
};

// Atoms closer than tol are merged by summing their masses, keeping
// first-occurrence order. The averaging map frequently sends distinct atoms
// to identical locations on symmetric inputs.
DiscreteMeasure merge_atoms(const Matrix& points, const Vector& masses, double tol = 1e-12);

// One averaging step: atom y_k of nu moves to the weighted mean (p = 2) or
// weighted geometric median (p = 1, accuracy eps) of its plan targets,
// weighted by lambda_i pi^i_{k,l} / nu_k. plans[i] must couple (nu, mu^i);
// marginals are checked to 1e-9.
DiscreteMeasure average_map_G(const DiscreteMeasure& nu, const std::vector<TransportPlan>& plans,
                              const Problem& problem, double eps);

// Same step, keeping the per-atom displacement data the error bounds need.
GStepDetail g_step_detail(const DiscreteMeasure& nu, const std::vector<TransportPlan>& plans,
                          const Problem& problem, double eps);

// argmax lambda_i, ties to the lowest index.
int default_ref_index(const Weights& weights);

// One averaging step from the reference measure mu^ref using the N - 1
// optimal plans into the other inputs (the self plan is the diagonal).
// Support size <= n_ref. The report carries the lower bound
// lambda_ref * Psi_p(mu^ref) and the adapted multiplier against it.
BarycenterResult reference_barycenter(const Problem& problem, int ref_index,
                                      const BarycenterOptions& options = {});

// Reference step on externally supplied plans; plans[ref_index] may be
// empty, the diagonal is substituted. Plans must be optimal couplings of
// (mu^ref, mu^i): the reported lower bound reads W_p^p off their costs.
BarycenterResult reference_barycenter_with_plans(const Problem& problem, int ref_index,
                                                 std::vector<TransportPlan> plans,
                                                 const BarycenterOptions& options = {});

// All N(N-1)/2 optimal plans between the inputs, upper triangle by (i, j).
// bound_costs holds W_p^p under the problem cost even when the plans were
// solved under the swap variant.
struct PairwisePlanSet {
  CostExponent plan_p = CostExponent::p2;
  Index n_measures = 0;
  std::vector<TransportPlan> upper;  // index pair_index(i, j)
  Matrix plan_costs;                 // under plan_p
  Matrix bound_costs;                // under the problem's p
};

Index pair_index(Index i, Index j, Index n);  // requires i < j

PairwisePlanSet compute_pairwise_plans(const Problem& problem,
                                       const BarycenterOptions& options = {});

// The N plans (pi^{i1}, ..., pi^{iN}) seen from measure i: transposes above
// the diagonal, the identity coupling at i itself.
std::vector<TransportPlan> plans_for_measure(const PairwisePlanSet& plans,
                                             const std::vector<DiscreteMeasure>& measures,
                                             Index i);

// Mixture-initialized averaging step: every atom of every input moves to the
// aggregation point of its pairwise plan targets, results mixed with weights
// lambda. Equals the lambda-mixture of the N reference outputs on the same
// plans; support size <= sum n_i. The report carries the pairwise lower
// bound and the adapted error multiplier eta.
BarycenterResult pairwise_barycenter(const Problem& problem, const BarycenterOptions& options = {});
BarycenterResult pairwise_barycenter_from_plans(const Problem& problem,
                                                const PairwisePlanSet& plans,
                                                const BarycenterOptions& options = {});

// Repeated averaging steps with freshly solved optimal plans. Entry r of the
// returned list is the measure and exact objective after r rounds (entry 0
// is the initialization). Stops early when a round leaves the measure
// unchanged within 1e-12. Improvements beyond the first round are typically
// marginal; one round is the intended production use.
std::vector<std::pair<DiscreteMeasure, double>> fixed_point_iterate(
    const Problem& problem, const DiscreteMeasure& init, int max_rounds,
    const BarycenterOptions& options = {});

}  // namespace wbary
