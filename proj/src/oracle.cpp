#include "wbary/oracle.hpp"

#include "wbary/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wbary {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kRatioTol = 1e-11;

// Dense two-phase tableau simplex. Rows 0..m-1 hold [A | I | b], row m the
// original cost row, row m+1 the phase-1 cost row. Bland's rule throughout:
// entering = lowest eligible column index, leaving = lowest basic index
// among the tied minimum ratios.
class DenseSimplex {
 public:
  DenseSimplex(const Matrix& A, const Vector& b, const Vector& c, long max_pivots)
      : m_(A.rows()), n_(A.cols()), max_pivots_(max_pivots) {
    if (b.size() != m_ || c.size() != n_) throw ValidationError("LP dimensions disagree");
    if (max_pivots_ <= 0) max_pivots_ = 10000 + 50 * (m_ + n_);

    tableau_.setZero(m_ + 2, n_ + m_ + 1);
    tableau_.topLeftCorner(m_, n_) = A;
    tableau_.block(0, n_, m_, m_).setIdentity();
    tableau_.col(n_ + m_).head(m_) = b;
    for (Index i = 0; i < m_; ++i) {
      if (tableau_(i, n_ + m_) < 0.0) tableau_.row(i) = -tableau_.row(i);
      tableau_(i, n_ + i) = 1.0;  // keep the artificial column positive
    }
    tableau_.row(m_).head(n_) = c.transpose();
    // Phase-1 reduced costs: artificials cost one and start basic.
    tableau_.row(m_ + 1) = -tableau_.topRows(m_).colwise().sum();
    tableau_.row(m_ + 1).segment(n_, m_).setZero();

    basis_.resize(static_cast<std::size_t>(m_));
    for (Index i = 0; i < m_; ++i) basis_[static_cast<std::size_t>(i)] = n_ + i;
  }

  LpSolution run() {
    // Phase 1: minimize the artificial mass.
    iterate(m_ + 1, n_ + m_);
    if (-tableau_(m_ + 1, n_ + m_) > 1e-7)
      throw SolverError("LP infeasible, residual artificial mass " +
                        std::to_string(-tableau_(m_ + 1, n_ + m_)));
    expel_artificials();
    // Phase 2 over the structural columns.
    iterate(m_, n_);

    LpSolution solution;
    solution.x = Vector::Zero(n_);
    for (Index i = 0; i < m_; ++i) {
      const Index var = basis_[static_cast<std::size_t>(i)];
      if (var < n_) solution.x[var] = std::max(0.0, tableau_(i, n_ + m_));
    }
    solution.objective = -tableau_(m_, n_ + m_);
    solution.pivots = pivots_;
    return solution;
  }

 private:
  void iterate(Index objective_row, Index column_limit) {
    for (;;) {
      Index entering = -1;
      for (Index j = 0; j < column_limit; ++j) {
        if (tableau_(objective_row, j) < -kPivotTol) {
          entering = j;
          break;
        }
      }
      if (entering < 0) return;

      Index leaving = -1;
      double best_ratio = 0.0;
      for (Index i = 0; i < m_; ++i) {
        const double a = tableau_(i, entering);
        if (a <= kRatioTol) continue;
        const double ratio = tableau_(i, n_ + m_) / a;
        if (leaving < 0 || ratio < best_ratio - 1e-15 ||
            (ratio <= best_ratio + 1e-15 &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving)])) {
          leaving = i;
          best_ratio = ratio;
        }
      }
      if (leaving < 0) throw SolverError("LP unbounded");
      if (pivots_ >= max_pivots_)
        throw SolverError("dense simplex exceeded its pivot budget after " +
                          std::to_string(pivots_) + " pivots");
      pivot(leaving, entering);
    }
  }

  void pivot(Index row, Index col) {
    tableau_.row(row) /= tableau_(row, col);
    for (Index i = 0; i < m_ + 2; ++i) {
      if (i == row) continue;
      const double factor = tableau_(i, col);
      if (factor != 0.0) tableau_.row(i) -= factor * tableau_.row(row);
    }
    tableau_(row, col) = 1.0;
    basis_[static_cast<std::size_t>(row)] = col;
    ++pivots_;
  }

  // After phase 1, swap artificials still in the basis for structural
  // columns where possible; rows without one are redundant and keep their
  // artificial pinned at zero.
  void expel_artificials() {
    for (Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < n_) continue;
      for (Index j = 0; j < n_; ++j) {
        if (std::abs(tableau_(i, j)) > 1e-7) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  Index m_;
  Index n_;
  long max_pivots_;
  long pivots_ = 0;
  Matrix tableau_;
  std::vector<Index> basis_;
};

}  // namespace

LpSolution solve_lp(const Matrix& A, const Vector& b, const Vector& c, long max_pivots) {
  DenseSimplex simplex(A, b, c, max_pivots);
  return simplex.run();
}

std::pair<TransportPlan, double> solve_ot_lp(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                             CostExponent p) {
  const Index n1 = mu.size();
  const Index n2 = nu.size();
  if (n1 * n2 > 10000)
    throw ValidationError("LP transport oracle limited to n1*n2 <= 10000, got " +
                          std::to_string(n1 * n2));

  const Matrix cost = cost_matrix(mu, nu, p);
  Matrix A = Matrix::Zero(n1 + n2, n1 * n2);
  Vector b(n1 + n2);
  Vector c(n1 * n2);
  for (Index k = 0; k < n1; ++k) {
    b[k] = mu.weights()[k];
    for (Index l = 0; l < n2; ++l) {
      const Index var = k * n2 + l;
      A(k, var) = 1.0;
      A(n1 + l, var) = 1.0;
      c[var] = cost(k, l);
    }
  }
  b.tail(n2) = nu.weights();

  const LpSolution solution = solve_lp(A, b, c);

  TransportPlan plan;
  plan.n_source = n1;
  plan.n_target = n2;
  plan.p = p;
  // Degenerate basic variables can carry roundoff instead of exact zero.
  for (Index k = 0; k < n1; ++k)
    for (Index l = 0; l < n2; ++l) {
      const double mass = solution.x[k * n2 + l];
      if (mass > 1e-13) plan.entries.push_back({k, l, mass});
    }
  const double cost_value = plan_cost(plan, cost);
  return {std::move(plan), cost_value};
}

namespace {

double tuple_count_guard(const Problem& problem) {
  double count = 1.0;
  for (const auto& mu : problem.measures) count *= static_cast<double>(mu.size());
  return count;
}

// Aggregation point of one support tuple under the problem weights.
Vector tuple_point(const Problem& problem, const std::vector<Index>& tuple) {
  const Index n = static_cast<Index>(problem.measures.size());
  const Index d = problem_dim(problem);
  Matrix pts(n, d);
  for (Index i = 0; i < n; ++i)
    pts.row(i) = problem.measures[static_cast<std::size_t>(i)].points().row(
        tuple[static_cast<std::size_t>(i)]);
  if (problem.p == CostExponent::p2) return pts.transpose() * problem.weights.vector();
  WeightedPointSet set(std::move(pts), problem.weights.vector());
  return geometric_median(set, 1e-9, 20000).point;
}

}  // namespace

std::pair<DiscreteMeasure, double> exact_barycenter(const Problem& problem) {
  const double tuples_needed = tuple_count_guard(problem);
  if (tuples_needed > 5000.0)
    throw ValidationError("exact barycenter limited to prod n_i <= 5000, got " +
                          std::to_string(tuples_needed));
  if (problem.p == CostExponent::p1 && problem_dim(problem) > 2)
    throw ValidationError("exact barycenter for p=1 is limited to d <= 2");

  const Index n_measures = static_cast<Index>(problem.measures.size());
  const Index d = problem_dim(problem);
  const Index tuple_count = static_cast<Index>(tuples_needed);

  // Enumerate tuples with an odometer; remember the aggregation point and
  // the per-tuple cost sum_i lambda_i ||z - x^i_{l_i}||^p.
  Matrix points(tuple_count, d);
  Vector costs(tuple_count);
  std::vector<std::vector<Index>> tuples(static_cast<std::size_t>(tuple_count));
  std::vector<Index> odo(static_cast<std::size_t>(n_measures), 0);
  for (Index t = 0; t < tuple_count; ++t) {
    const Vector z = tuple_point(problem, odo);
    points.row(t) = z.transpose();
    KahanSum cost;
    for (Index i = 0; i < n_measures; ++i) {
      const auto& mu = problem.measures[static_cast<std::size_t>(i)];
      const double dist = (mu.points().row(odo[static_cast<std::size_t>(i)]).transpose() - z).norm();
      cost.add(problem.weights[i] * power_cost(dist, problem.p));
    }
    costs[t] = cost.value();
    tuples[static_cast<std::size_t>(t)] = odo;
    for (Index i = n_measures - 1; i >= 0; --i) {
      auto& digit = odo[static_cast<std::size_t>(i)];
      if (++digit < problem.measures[static_cast<std::size_t>(i)].size()) break;
      digit = 0;
    }
  }

  // Marginal constraints: the tuple masses hitting atom l of measure i must
  // add up to mu^i_l.
  const Index rows = total_support_size(problem);
  Matrix A = Matrix::Zero(rows, tuple_count);
  Vector b(rows);
  Index row0 = 0;
  for (Index i = 0; i < n_measures; ++i) {
    const auto& mu = problem.measures[static_cast<std::size_t>(i)];
    b.segment(row0, mu.size()) = mu.weights();
    for (Index t = 0; t < tuple_count; ++t)
      A(row0 + tuples[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)], t) = 1.0;
    row0 += mu.size();
  }

  const LpSolution lp = solve_lp(A, b, costs);

  // Assemble the measure from the basic solution, merging points that
  // coincide up to the candidate dedup tolerance.
  std::vector<Vector> atom_points;
  std::vector<double> atom_masses;
  for (Index t = 0; t < tuple_count; ++t) {
    const double mass = lp.x[t];
    if (mass <= 1e-13) continue;  // roundoff on degenerate basics
    const Vector z = points.row(t).transpose();
    bool merged = false;
    for (std::size_t k = 0; k < atom_points.size() && !merged; ++k) {
      if ((atom_points[k] - z).norm() <= 1e-12) {
        atom_masses[k] += mass;
        merged = true;
      }
    }
    if (!merged) {
      atom_points.push_back(z);
      atom_masses.push_back(mass);
    }
  }
  Matrix out_pts(static_cast<Index>(atom_points.size()), d);
  Vector out_w(static_cast<Index>(atom_points.size()));
  for (std::size_t k = 0; k < atom_points.size(); ++k) {
    out_pts.row(static_cast<Index>(k)) = atom_points[k].transpose();
    out_w[static_cast<Index>(k)] = atom_masses[k];
  }
  DiscreteMeasure measure(std::move(out_pts), std::move(out_w));
  const double objective = wasserstein_objective(measure, problem);
  return {std::move(measure), objective};
}

double fixed_support_barycenter_lp(const Problem& problem, const Matrix& candidates) {
  const Index s_count = candidates.rows();
  const Index d = problem_dim(problem);
  if (s_count < 1) throw ValidationError("empty candidate support");
  if (candidates.cols() != d) throw ValidationError("candidate dimension mismatch");
  const Index n_measures = static_cast<Index>(problem.measures.size());
  const Index total = total_support_size(problem);
  if (s_count * total > 100000)
    throw ValidationError("fixed-support LP too large: " + std::to_string(s_count * total) +
                          " variables");

  // Variables: couplings pi^i between the candidate support and measure i,
  // laid out measure-major. Constraints: the measure-side marginals, and for
  // i >= 2 the candidate-side marginal tied to the one of pi^1.
  std::vector<Index> offset(static_cast<std::size_t>(n_measures) + 1, 0);
  for (Index i = 0; i < n_measures; ++i)
    offset[static_cast<std::size_t>(i) + 1] =
        offset[static_cast<std::size_t>(i)] +
        s_count * problem.measures[static_cast<std::size_t>(i)].size();
  const Index vars = offset[static_cast<std::size_t>(n_measures)];
  const Index rows = total + s_count * (n_measures - 1);

  Matrix A = Matrix::Zero(rows, vars);
  Vector b = Vector::Zero(rows);
  Vector c = Vector::Zero(vars);

  Index row0 = 0;
  for (Index i = 0; i < n_measures; ++i) {
    const auto& mu = problem.measures[static_cast<std::size_t>(i)];
    const Index ni = mu.size();
    for (Index s = 0; s < s_count; ++s)
      for (Index l = 0; l < ni; ++l) {
        const Index var = offset[static_cast<std::size_t>(i)] + s * ni + l;
        const double dist = (candidates.row(s) - mu.points().row(l)).norm();
        c[var] = problem.weights[i] * power_cost(dist, problem.p);
        A(row0 + l, var) = 1.0;
      }
    b.segment(row0, ni) = mu.weights();
    row0 += ni;
  }
  for (Index i = 1; i < n_measures; ++i) {
    const Index ni = problem.measures[static_cast<std::size_t>(i)].size();
    const Index n0 = problem.measures[0].size();
    for (Index s = 0; s < s_count; ++s) {
      const Index row = row0 + (i - 1) * s_count + s;
      for (Index l = 0; l < ni; ++l) A(row, offset[static_cast<std::size_t>(i)] + s * ni + l) = 1.0;
      for (Index l = 0; l < n0; ++l) A(row, offset[0] + s * n0 + l) -= 1.0;
    }
  }

  return solve_lp(A, b, c).objective;
}

}  // namespace wbary
