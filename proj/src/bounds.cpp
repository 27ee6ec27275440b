#include "wbary/bounds.hpp"

#include <cmath>

namespace wbary {

namespace {

constexpr double kDegenerateFloor = 1e-15;

AdaptedBound finish_general(double numerator, double lower_bound) {
  AdaptedBound bound;
  if (lower_bound <= kDegenerateFloor) {
    bound.degenerate = true;
    return bound;  // optimal by convention: identical inputs cost nothing
  }
  bound.raw = numerator / lower_bound;
  bound.eta = std::max(1.0, bound.raw);
  return bound;
}

}  // namespace

double pairwise_lower_bound(const Matrix& pairwise_costs, const Weights& weights) {
  const Index n = weights.size();
  if (pairwise_costs.rows() != n || pairwise_costs.cols() != n)
    throw ValidationError("pairwise cost matrix has the wrong shape");
  if ((pairwise_costs.array() < 0.0).any())
    throw ValidationError("pairwise cost matrix has negative entries");
  if ((pairwise_costs - pairwise_costs.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("pairwise cost matrix is not symmetric");
  if (pairwise_costs.diagonal().cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("pairwise cost matrix has a nonzero diagonal");

  KahanSum sum;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) sum.add(weights[i] * weights[j] * pairwise_costs(i, j));
  return sum.value();
}

double init_bound_single(const Weights& weights, Index j) {
  if (j < 0 || j >= weights.size())
    throw ValidationError("init bound index " + std::to_string(j) + " out of range");
  return 1.0 / weights[j];
}

double init_bound_mixture() { return 2.0; }

double g_step_transport_cost(const GStepDetail& detail, const std::vector<TransportPlan>& plans,
                             const Problem& problem) {
  if (plans.size() != problem.measures.size())
    throw ValidationError("plan list does not match the problem");
  KahanSum total;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& mu = problem.measures[i];
    const double lambda = problem.weights[static_cast<Index>(i)];
    for (const auto& entry : plans[i].entries) {
      const double dist =
          (detail.mapped_points.row(entry.row) - mu.points().row(entry.col)).norm();
      total.add(lambda * entry.mass * power_cost(dist, problem.p));
    }
  }
  return total.value();
}

AdaptedBound adapted_bound_general(const GStepDetail& detail,
                                   const std::vector<TransportPlan>& plans,
                                   const Problem& problem, const Matrix& pairwise_costs) {
  return adapted_bound_general(detail, plans, problem,
                               pairwise_lower_bound(pairwise_costs, problem.weights));
}

AdaptedBound adapted_bound_general(const GStepDetail& detail,
                                   const std::vector<TransportPlan>& plans,
                                   const Problem& problem, double lower_bound) {
  return finish_general(g_step_transport_cost(detail, plans, problem), lower_bound);
}

AdaptedBound adapted_bound_p2(const Vector& masses, const Vector& squared_displacements,
                              const Matrix& pairwise_costs, const Weights& weights) {
  return adapted_bound_p2(masses, squared_displacements,
                          pairwise_lower_bound(pairwise_costs, weights));
}

AdaptedBound adapted_bound_p2(const Vector& masses, const Vector& squared_displacements,
                              double lower_bound) {
  if (masses.size() != squared_displacements.size())
    throw ValidationError("displacement vector does not match the masses");
  AdaptedBound bound;
  if (lower_bound <= kDegenerateFloor) {
    bound.degenerate = true;
    return bound;
  }
  KahanSum moved;
  for (Index k = 0; k < masses.size(); ++k) moved.add(masses[k] * squared_displacements[k]);
  bound.raw = 2.0 - moved.value() / lower_bound;
  bound.eta = std::min(2.0, std::max(1.0, bound.raw));
  return bound;
}

}  // namespace wbary
