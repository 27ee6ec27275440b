#include "wbary/barycenter.hpp"

#include "wbary/geometry.hpp"
#include "wbary/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace wbary {

DiscreteMeasure merge_atoms(const Matrix& points, const Vector& masses, double tol) {
  std::vector<Index> keep;
  std::vector<double> merged;
  for (Index k = 0; k < points.rows(); ++k) {
    bool absorbed = false;
    for (std::size_t m = 0; m < keep.size() && !absorbed; ++m) {
      if ((points.row(keep[m]) - points.row(k)).norm() <= tol) {
        merged[m] += masses[k];
        absorbed = true;
      }
    }
    if (!absorbed) {
      keep.push_back(k);
      merged.push_back(masses[k]);
    }
  }
  Matrix pts(static_cast<Index>(keep.size()), points.cols());
  Vector w(static_cast<Index>(keep.size()));
  for (std::size_t m = 0; m < keep.size(); ++m) {
    pts.row(static_cast<Index>(m)) = points.row(keep[m]);
    w[static_cast<Index>(m)] = merged[m];
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

GStepDetail g_step_detail(const DiscreteMeasure& nu, const std::vector<TransportPlan>& plans,
                          const Problem& problem, double eps) {
  const Index n_measures = static_cast<Index>(problem.measures.size());
  if (static_cast<Index>(plans.size()) != n_measures)
    throw ValidationError("averaging step needs one plan per input measure");
  for (Index i = 0; i < n_measures; ++i)
    check_plan_marginals(plans[static_cast<std::size_t>(i)], nu,
                         problem.measures[static_cast<std::size_t>(i)]);

  // Bucket the plan entries by source atom.
  struct Target {
    Index measure;
    Index atom;
    double mass;
  };
  std::vector<std::vector<Target>> rows(static_cast<std::size_t>(nu.size()));
  for (Index i = 0; i < n_measures; ++i)
    for (const auto& entry : plans[static_cast<std::size_t>(i)].entries)
      rows[static_cast<std::size_t>(entry.row)].push_back({i, entry.col, entry.mass});

  const Index d = nu.dim();
  GStepDetail detail;
  detail.source_points = nu.points();
  detail.source_masses = nu.weights();
  detail.mapped_points.resize(nu.size(), d);

  for (Index k = 0; k < nu.size(); ++k) {
    const auto& targets = rows[static_cast<std::size_t>(k)];
    if (targets.empty())
      throw std::logic_error("feasible plans left atom " + std::to_string(k) + " without targets");
    const double nu_k = nu.weights()[k];

    Matrix pts(static_cast<Index>(targets.size()), d);
    Vector w(static_cast<Index>(targets.size()));
    for (std::size_t t = 0; t < targets.size(); ++t) {
      pts.row(static_cast<Index>(t)) =
          problem.measures[static_cast<std::size_t>(targets[t].measure)].points().row(
              targets[t].atom);
      w[static_cast<Index>(t)] =
          problem.weights[targets[t].measure] * targets[t].mass / nu_k;
    }
    WeightedPointSet set(std::move(pts), std::move(w));
    if (problem.p == CostExponent::p2)
      detail.mapped_points.row(k) = weighted_mean(set).transpose();
    else
      detail.mapped_points.row(k) = geometric_median(set, eps).point.transpose();
  }
  return detail;
}

DiscreteMeasure average_map_G(const DiscreteMeasure& nu, const std::vector<TransportPlan>& plans,
                              const Problem& problem, double eps) {
  const GStepDetail detail = g_step_detail(nu, plans, problem, eps);
  return merge_atoms(detail.mapped_points, detail.source_masses);
}

int default_ref_index(const Weights& weights) {
  Index best = 0;
  for (Index i = 1; i < weights.size(); ++i)
    if (weights[i] > weights[best]) best = i;
  return static_cast<int>(best);
}

namespace {

CostExponent plan_exponent(const Problem& problem, const BarycenterOptions& options) {
  return options.plan_cost == PlanCost::SquaredEuclidean ? CostExponent::p2 : problem.p;
}

double worst_case_multiplier(const Problem& problem, const BarycenterOptions& options,
                             double inverse_weight) {
  const double eps_factor = problem.p == CostExponent::p1 ? 1.0 + options.eps : 1.0;
  return eps_factor * inverse_weight;
}

}  // namespace

BarycenterResult reference_barycenter(const Problem& problem, int ref_index,
                                      const BarycenterOptions& options) {
  const Index n_measures = static_cast<Index>(problem.measures.size());
  if (ref_index < 0 || ref_index >= n_measures)
    throw ValidationError("reference index " + std::to_string(ref_index) + " out of range");
  const CostExponent plan_p = plan_exponent(problem, options);
  const auto& ref = problem.measures[static_cast<std::size_t>(ref_index)];

  std::vector<TransportPlan> plans(static_cast<std::size_t>(n_measures));
  parallel_for(static_cast<std::size_t>(n_measures), [&](std::size_t i) {
    if (static_cast<int>(i) == ref_index) return;
    plans[i] = solve_ot(ref, problem.measures[i], plan_p, options.ot).plan;
  });
  return reference_barycenter_with_plans(problem, ref_index, std::move(plans), options);
}

BarycenterResult reference_barycenter_with_plans(const Problem& problem, int ref_index,
                                                 std::vector<TransportPlan> plans,
                                                 const BarycenterOptions& options) {
  const Index n_measures = static_cast<Index>(problem.measures.size());
  if (ref_index < 0 || ref_index >= n_measures)
    throw ValidationError("reference index " + std::to_string(ref_index) + " out of range");
  const auto& ref = problem.measures[static_cast<std::size_t>(ref_index)];
  if (plans[static_cast<std::size_t>(ref_index)].entries.empty())
    plans[static_cast<std::size_t>(ref_index)] = diagonal_plan(ref, problem.p);

  const GStepDetail detail = g_step_detail(ref, plans, problem, options.eps);

  // Psi_p(mu^ref) from the plan costs; extra exact solves only when the
  // plans were produced under the swap variant and do not carry W_p.
  const CostExponent plan_p = plan_exponent(problem, options);
  std::vector<double> ref_costs(static_cast<std::size_t>(n_measures), 0.0);
  parallel_for(static_cast<std::size_t>(n_measures), [&](std::size_t i) {
    if (static_cast<int>(i) == ref_index) return;
    if (plan_p == problem.p)
      ref_costs[i] = plan_cost(plans[i], cost_matrix(ref, problem.measures[i], problem.p));
    else
      ref_costs[i] = solve_ot(ref, problem.measures[i], problem.p, options.ot).cost;
  });
  KahanSum psi_ref;
  for (Index i = 0; i < n_measures; ++i)
    psi_ref.add(problem.weights[i] * ref_costs[static_cast<std::size_t>(i)]);
  const double lower_bound = problem.weights[ref_index] * psi_ref.value();

  BarycenterResult result{merge_atoms(detail.mapped_points, detail.source_masses),
                          0.0,
                          Method::Reference,
                          problem.p,
                          ref_index,
                          options.eps,
                          {}};
  result.objective = wasserstein_objective(result.measure, problem, options.ot);

  const AdaptedBound adapted = adapted_bound_general(detail, plans, problem, lower_bound);
  result.bounds.lower_bound = lower_bound;
  result.bounds.eta_adapted = adapted.eta;
  result.bounds.eta_adapted_raw = adapted.raw;
  result.bounds.degenerate = adapted.degenerate;
  result.bounds.eta_worst_case =
      worst_case_multiplier(problem, options, 1.0 / problem.weights[ref_index]);
  return result;
}

Index pair_index(Index i, Index j, Index n) {
  // Position of (i, j), i < j, in row-major upper-triangle order.
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

PairwisePlanSet compute_pairwise_plans(const Problem& problem, const BarycenterOptions& options) {
  const Index n = static_cast<Index>(problem.measures.size());
  PairwisePlanSet set;
  set.plan_p = plan_exponent(problem, options);
  set.n_measures = n;
  set.upper.resize(static_cast<std::size_t>(n * (n - 1) / 2));
  set.plan_costs = Matrix::Zero(n, n);
  set.bound_costs = Matrix::Zero(n, n);

  std::vector<std::pair<Index, Index>> jobs;
  jobs.reserve(set.upper.size());
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) jobs.emplace_back(i, j);

  const bool swap_variant = set.plan_p != problem.p;
  std::vector<double> bound_cost(jobs.size(), 0.0);
  parallel_for(jobs.size(), [&](std::size_t t) {
    const auto [i, j] = jobs[t];
    const auto& mi = problem.measures[static_cast<std::size_t>(i)];
    const auto& mj = problem.measures[static_cast<std::size_t>(j)];
    OtSolution solution = solve_ot(mi, mj, set.plan_p, options.ot);
    set.plan_costs(i, j) = set.plan_costs(j, i) = solution.cost;
    // W_p^p under the problem cost, re-solved when the plan cost differs.
    bound_cost[t] =
        swap_variant ? solve_ot(mi, mj, problem.p, options.ot).cost : solution.cost;
    set.upper[static_cast<std::size_t>(pair_index(i, j, n))] = std::move(solution.plan);
  });
  for (std::size_t t = 0; t < jobs.size(); ++t) {
    const auto [i, j] = jobs[t];
    set.bound_costs(i, j) = set.bound_costs(j, i) = bound_cost[t];
  }
  return set;
}

std::vector<TransportPlan> plans_for_measure(const PairwisePlanSet& plans,
                                             const std::vector<DiscreteMeasure>& measures,
                                             Index i) {
  const Index n = plans.n_measures;
  std::vector<TransportPlan> result(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    if (j == i)
      result[static_cast<std::size_t>(j)] =
          diagonal_plan(measures[static_cast<std::size_t>(i)], plans.plan_p);
    else if (i < j)
      result[static_cast<std::size_t>(j)] =
          plans.upper[static_cast<std::size_t>(pair_index(i, j, n))];
    else
      result[static_cast<std::size_t>(j)] =
          transpose_plan(plans.upper[static_cast<std::size_t>(pair_index(j, i, n))]);
  }
  return result;
}

BarycenterResult pairwise_barycenter(const Problem& problem, const BarycenterOptions& options) {
  return pairwise_barycenter_from_plans(problem, compute_pairwise_plans(problem, options),
                                        options);
}

BarycenterResult pairwise_barycenter_from_plans(const Problem& problem,
                                                const PairwisePlanSet& plans,
                                                const BarycenterOptions& options) {
  const Index n = static_cast<Index>(problem.measures.size());
  if (plans.n_measures != n) throw ValidationError("plan set does not match the problem");
  const Index total = total_support_size(problem);
  const Index d = problem_dim(problem);

  // Per-measure averaging steps on the shared plans, mixed with weights
  // lambda. Equivalent to one averaging step from the mixture under the
  // composite plans.
  std::vector<GStepDetail> details(static_cast<std::size_t>(n));
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto measure_plans = plans_for_measure(plans, problem.measures, static_cast<Index>(i));
    details[i] = g_step_detail(problem.measures[i], measure_plans, problem, options.eps);
  });

  Matrix stacked_points(total, d);
  Vector stacked_masses(total);
  Vector squared_displacements(total);
  Index row0 = 0;
  for (Index i = 0; i < n; ++i) {
    const GStepDetail& detail = details[static_cast<std::size_t>(i)];
    const Index ni = detail.source_masses.size();
    stacked_points.middleRows(row0, ni) = detail.mapped_points;
    stacked_masses.segment(row0, ni) = problem.weights[i] * detail.source_masses;
    squared_displacements.segment(row0, ni) =
        (detail.mapped_points - detail.source_points).rowwise().squaredNorm();
    row0 += ni;
  }

  BarycenterResult result{merge_atoms(stacked_points, stacked_masses),
                          0.0,
                          Method::Pairwise,
                          problem.p,
                          -1,
                          options.eps,
                          {}};
  result.objective = wasserstein_objective(result.measure, problem, options.ot);

  const double lower_bound = pairwise_lower_bound(plans.bound_costs, problem.weights);
  AdaptedBound adapted;
  if (problem.p == CostExponent::p2) {
    adapted = adapted_bound_p2(stacked_masses, squared_displacements, lower_bound);
  } else {
    KahanSum numerator;
    for (Index i = 0; i < n; ++i) {
      const auto measure_plans = plans_for_measure(plans, problem.measures, i);
      numerator.add(problem.weights[i] *
                    g_step_transport_cost(details[static_cast<std::size_t>(i)], measure_plans,
                                          problem));
    }
    if (lower_bound <= 1e-15) {
      adapted.degenerate = true;
    } else {
      adapted.raw = numerator.value() / lower_bound;
      adapted.eta = std::max(1.0, adapted.raw);
    }
  }

  result.bounds.lower_bound = lower_bound;
  result.bounds.eta_adapted = adapted.eta;
  result.bounds.eta_adapted_raw = adapted.raw;
  result.bounds.degenerate = adapted.degenerate;
  result.bounds.eta_worst_case = worst_case_multiplier(problem, options, 2.0);
  result.bounds.pairwise_costs = plans.bound_costs;
  return result;
}

std::vector<std::pair<DiscreteMeasure, double>> fixed_point_iterate(
    const Problem& problem, const DiscreteMeasure& init, int max_rounds,
    const BarycenterOptions& options) {
  if (max_rounds < 1) throw ValidationError("fixed point iteration needs max_rounds >= 1");
  if (init.dim() != problem_dim(problem))
    throw ValidationError("initial measure dimension does not match the problem");

  const Index n = static_cast<Index>(problem.measures.size());
  auto solve_plans = [&](const DiscreteMeasure& nu) {
    std::vector<OtSolution> solutions(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      solutions[i] = solve_ot(nu, problem.measures[i], problem.p, options.ot);
    });
    return solutions;
  };
  auto objective_of = [&](const std::vector<OtSolution>& solutions) {
    KahanSum psi;
    for (Index i = 0; i < n; ++i) psi.add(problem.weights[i] * solutions[static_cast<std::size_t>(i)].cost);
    return psi.value();
  };

  std::vector<std::pair<DiscreteMeasure, double>> history;
  history.reserve(static_cast<std::size_t>(max_rounds) + 1);

  DiscreteMeasure current = init;
  std::vector<OtSolution> solutions = solve_plans(current);
  history.emplace_back(current, objective_of(solutions));

  for (int round = 0; round < max_rounds; ++round) {
    std::vector<TransportPlan> plans;
    plans.reserve(static_cast<std::size_t>(n));
    for (auto& s : solutions) plans.push_back(s.plan);
    DiscreteMeasure next = average_map_G(current, plans, problem, options.eps);
    solutions = solve_plans(next);
    history.emplace_back(next, objective_of(solutions));
    const bool unchanged = measures_equal(current, next, 1e-12);
    current = std::move(next);
    if (unchanged) break;
  }
  return history;
}

}  // namespace wbary
