#include "wbary/ot.hpp"

#include "wbary/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace wbary {

Matrix cost_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostExponent p) {
  if (mu.dim() != nu.dim())
    throw ValidationError("cost matrix between dimensions " + std::to_string(mu.dim()) + " and " +
                          std::to_string(nu.dim()));
  Matrix c(mu.size(), nu.size());
  for (Index k = 0; k < mu.size(); ++k)
    for (Index l = 0; l < nu.size(); ++l) {
      const double dist = (mu.points().row(k) - nu.points().row(l)).norm();
      c(k, l) = power_cost(dist, p);
    }
  return c;
}

namespace {

// Network simplex on the dense bipartite transportation graph. Nodes are the
// n1 sources followed by the n2 sinks; the basis is a spanning tree held as
// n1 + n2 - 1 arcs plus adjacency lists. Parents, depths and potentials are
// rebuilt from the root after every pivot, which keeps the pivot O(n1 + n2)
// at the problem sizes this solver is meant for.
class NetworkSimplex {
 public:
  NetworkSimplex(const Matrix& cost, Vector supply, Vector demand, long max_pivots)
      : cost_(cost),
        supply_(std::move(supply)),
        demand_(std::move(demand)),
        n1_(cost.rows()),
        n2_(cost.cols()),
        max_pivots_(max_pivots) {
    const Index nodes = n1_ + n2_;
    adjacency_.resize(static_cast<std::size_t>(nodes));
    parent_node_.assign(static_cast<std::size_t>(nodes), -1);
    parent_arc_.assign(static_cast<std::size_t>(nodes), -1);
    depth_.assign(static_cast<std::size_t>(nodes), 0);
    visited_.assign(static_cast<std::size_t>(nodes), false);
    u_.setZero(n1_);
    v_.setZero(n2_);
    opt_tol_ = 1e-11 * std::max(1.0, cost_.cwiseAbs().maxCoeff());
    block_size_ = std::max<Index>(64, static_cast<Index>(std::sqrt(double(n1_) * double(n2_))));
    if (max_pivots_ <= 0) max_pivots_ = 10000 + 100 * (n1_ + n2_) + n1_ * n2_;
  }

  void run() {
    northwest_corner();
    rebuild_tree();
    for (;;) {
      const Index entering = price();
      if (entering < 0) return;  // dual feasible within tolerance
      if (pivots_ >= max_pivots_)
        throw SolverError("network simplex exceeded its pivot budget after " +
                          std::to_string(pivots_) + " pivots");
      pivot(entering);
      ++pivots_;
    }
  }

  struct BasicArc {
    Index row = 0;
    Index col = 0;
    double flow = 0.0;
  };

  const std::vector<BasicArc>& basis() const { return basis_; }
  const Vector& u() const { return u_; }
  const Vector& v() const { return v_; }
  long pivots() const { return pivots_; }

 private:
  Index col_node(Index col) const { return n1_ + col; }

  void northwest_corner() {
    Vector a = supply_;
    Vector b = demand_;
    basis_.reserve(static_cast<std::size_t>(n1_ + n2_ - 1));
    Index i = 0, j = 0;
    for (;;) {
      const double t = std::min(a[i], b[j]);
      add_basic_arc({i, j, t});
      a[i] -= t;
      b[j] -= t;
      if (i == n1_ - 1 && j == n2_ - 1) break;
      if (i < n1_ - 1 && (a[i] <= b[j] || j == n2_ - 1))
        ++i;
      else
        ++j;
    }
  }

  void add_basic_arc(BasicArc arc) {
    const int id = static_cast<int>(basis_.size());
    basis_.push_back(arc);
    adjacency_[static_cast<std::size_t>(arc.row)].push_back(id);
    adjacency_[static_cast<std::size_t>(col_node(arc.col))].push_back(id);
  }

  void detach(int id, Index node) {
    auto& list = adjacency_[static_cast<std::size_t>(node)];
    list.erase(std::find(list.begin(), list.end(), id));
  }

  // DFS from node 0: parents, depths and potentials. Tree arcs end up with
  // reduced cost exactly zero because v (or u) is defined by the same
  // subtraction the pricing step performs.
  void rebuild_tree() {
    std::fill(visited_.begin(), visited_.end(), false);
    stack_.clear();
    stack_.push_back(0);
    visited_[0] = true;
    parent_node_[0] = -1;
    parent_arc_[0] = -1;
    depth_[0] = 0;
    u_[0] = 0.0;
    while (!stack_.empty()) {
      const Index x = stack_.back();
      stack_.pop_back();
      for (const int id : adjacency_[static_cast<std::size_t>(x)]) {
        const BasicArc& arc = basis_[static_cast<std::size_t>(id)];
        const Index other = (x == arc.row) ? col_node(arc.col) : arc.row;
        if (visited_[static_cast<std::size_t>(other)]) continue;
        visited_[static_cast<std::size_t>(other)] = true;
        parent_node_[static_cast<std::size_t>(other)] = static_cast<int>(x);
        parent_arc_[static_cast<std::size_t>(other)] = id;
        depth_[static_cast<std::size_t>(other)] = depth_[static_cast<std::size_t>(x)] + 1;
        if (other >= n1_)
          v_[other - n1_] = cost_(arc.row, arc.col) - u_[arc.row];
        else
          u_[other] = cost_(arc.row, arc.col) - v_[arc.col];
        stack_.push_back(other);
      }
    }
  }

  double reduced_cost(Index arc_id) const {
    const Index i = arc_id / n2_;
    const Index j = arc_id % n2_;
    return cost_(i, j) - u_[i] - v_[j];
  }

  // Block search: scan fixed-size blocks from a roving pointer and return
  // the most negative arc of the first block that contains one. In Bland
  // mode the first negative arc by index wins instead.
  Index price() {
    const Index arc_count = n1_ * n2_;
    if (bland_mode_) {
      for (Index e = 0; e < arc_count; ++e)
        if (reduced_cost(e) < -opt_tol_) return e;
      return -1;
    }
    Index scanned = 0;
    Index e = next_arc_;
    while (scanned < arc_count) {
      Index best = -1;
      double best_rc = -opt_tol_;
      for (Index step = 0; step < block_size_ && scanned < arc_count; ++step, ++scanned) {
        const double rc = reduced_cost(e);
        if (rc < best_rc) {
          best_rc = rc;
          best = e;
        }
        ++e;
        if (e == arc_count) e = 0;
      }
      if (best >= 0) {
        next_arc_ = e;
        return best;
      }
    }
    return -1;
  }

  void pivot(Index entering_id) {
    const Index i0 = entering_id / n2_;
    const Index j0 = entering_id % n2_;
    const double entering_rc = reduced_cost(entering_id);

    // Tree path between the endpoints of the entering arc. Arcs collected
    // while walking up from the source side are traversed parent-to-node in
    // the cycle, those from the target side node-to-parent.
    path_from_row_.clear();   // (arc id, walk node) pairs from i0 upward
    path_from_col_.clear();   // likewise from the sink node of j0
    Index a = i0;
    Index b = col_node(j0);
    while (depth_[static_cast<std::size_t>(a)] > depth_[static_cast<std::size_t>(b)]) {
      path_from_row_.push_back({parent_arc_[static_cast<std::size_t>(a)], a});
      a = parent_node_[static_cast<std::size_t>(a)];
    }
    while (depth_[static_cast<std::size_t>(b)] > depth_[static_cast<std::size_t>(a)]) {
      path_from_col_.push_back({parent_arc_[static_cast<std::size_t>(b)], b});
      b = parent_node_[static_cast<std::size_t>(b)];
    }
    while (a != b) {
      path_from_row_.push_back({parent_arc_[static_cast<std::size_t>(a)], a});
      a = parent_node_[static_cast<std::size_t>(a)];
      path_from_col_.push_back({parent_arc_[static_cast<std::size_t>(b)], b});
      b = parent_node_[static_cast<std::size_t>(b)];
    }

    // Pushing flow along i0 -> j0: an arc traversed col-to-row loses flow.
    // From the col-side walk that is every arc whose walk node is a sink;
    // from the row-side walk every arc whose walk node is a source.
    auto decreasing = [&](const std::pair<int, Index>& step, bool row_side) {
      const bool node_is_col = step.second >= n1_;
      return row_side ? !node_is_col : node_is_col;
    };

    int leaving = -1;
    double delta = std::numeric_limits<double>::infinity();
    auto consider = [&](const std::pair<int, Index>& step, bool row_side) {
      if (!decreasing(step, row_side)) return;
      const double flow = basis_[static_cast<std::size_t>(step.first)].flow;
      if (leaving < 0 || flow < delta) {
        delta = flow;
        leaving = step.first;
      } else if (bland_mode_ && flow == delta &&
                 arc_index(step.first) < arc_index(leaving)) {
        leaving = step.first;
      }
    };
    for (const auto& step : path_from_col_) consider(step, false);
    for (const auto& step : path_from_row_) consider(step, true);
    if (leaving < 0) throw SolverError("transportation cycle without a leaving arc");

    for (const auto& step : path_from_col_) {
      BasicArc& arc = basis_[static_cast<std::size_t>(step.first)];
      arc.flow += decreasing(step, false) ? -delta : delta;
    }
    for (const auto& step : path_from_row_) {
      BasicArc& arc = basis_[static_cast<std::size_t>(step.first)];
      arc.flow += decreasing(step, true) ? -delta : delta;
    }

    // Replace the leaving arc by the entering one in place.
    BasicArc& slot = basis_[static_cast<std::size_t>(leaving)];
    detach(leaving, slot.row);
    detach(leaving, col_node(slot.col));
    slot = {i0, j0, delta};
    adjacency_[static_cast<std::size_t>(i0)].push_back(leaving);
    adjacency_[static_cast<std::size_t>(col_node(j0))].push_back(leaving);

    rebuild_tree();

    // Long degenerate stretches switch pricing to Bland's rule.
    if (delta * std::abs(entering_rc) > 1e-15) {
      stalled_ = 0;
    } else if (!bland_mode_ && ++stalled_ > 1000 + 5 * (n1_ + n2_)) {
      bland_mode_ = true;
    }
  }

  Index arc_index(int basic_id) const {
    const BasicArc& arc = basis_[static_cast<std::size_t>(basic_id)];
    return arc.row * n2_ + arc.col;
  }

  const Matrix& cost_;
  Vector supply_;
  Vector demand_;
  Index n1_;
  Index n2_;
  long max_pivots_;
  long pivots_ = 0;
  double opt_tol_ = 0.0;
  Index block_size_ = 64;
  Index next_arc_ = 0;
  bool bland_mode_ = false;
  long stalled_ = 0;

  std::vector<BasicArc> basis_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> parent_node_;
  std::vector<int> parent_arc_;
  std::vector<Index> depth_;
  std::vector<bool> visited_;
  std::vector<Index> stack_;
  std::vector<std::pair<int, Index>> path_from_row_;
  std::vector<std::pair<int, Index>> path_from_col_;
  Vector u_;
  Vector v_;
};

}  // namespace

OtSolution solve_transportation(const Matrix& cost, Vector supply, Vector demand,
                                CostExponent p_tag, const OtOptions& options) {
  if (cost.rows() != supply.size() || cost.cols() != demand.size())
    throw ValidationError("transportation cost matrix does not match the marginals");
  if (supply.size() == 0 || demand.size() == 0)
    throw ValidationError("transportation problem with empty side");
  if (!supply.allFinite() || !demand.allFinite() || !cost.allFinite())
    throw ValidationError("transportation problem with non-finite data");
  if ((supply.array() < 0.0).any() || (demand.array() < 0.0).any())
    throw ValidationError("transportation marginals must be nonnegative");

  const double total_supply = stable_sum(supply);
  const double total_demand = stable_sum(demand);
  if (!(total_supply > 0.0)) throw ValidationError("transportation supply is zero");
  if (std::abs(total_supply - total_demand) > 1e-9)
    throw ValidationError("transportation marginals differ in total mass by " +
                          std::to_string(std::abs(total_supply - total_demand)));
  demand *= total_supply / total_demand;

  NetworkSimplex simplex(cost, std::move(supply), std::move(demand), options.max_pivots);
  simplex.run();

  OtSolution solution;
  solution.plan.n_source = cost.rows();
  solution.plan.n_target = cost.cols();
  solution.plan.p = p_tag;
  for (const auto& arc : simplex.basis())
    if (arc.flow > 0.0) solution.plan.entries.push_back({arc.row, arc.col, arc.flow});
  std::sort(solution.plan.entries.begin(), solution.plan.entries.end(),
            [](const PlanEntry& a, const PlanEntry& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  solution.cost = plan_cost(solution.plan, cost);
  solution.source_potentials = simplex.u();
  solution.target_potentials = simplex.v();
  solution.pivots = simplex.pivots();
  return solution;
}

OtSolution solve_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu, CostExponent p,
                    const OtOptions& options) {
  const Matrix c = cost_matrix(mu, nu, p);
  return solve_transportation(c, mu.weights(), nu.weights(), p, options);
}

TransportPlan transpose_plan(const TransportPlan& plan) {
  TransportPlan t;
  t.n_source = plan.n_target;
  t.n_target = plan.n_source;
  t.p = plan.p;
  t.entries.reserve(plan.entries.size());
  for (const auto& e : plan.entries) t.entries.push_back({e.col, e.row, e.mass});
  std::sort(t.entries.begin(), t.entries.end(), [](const PlanEntry& a, const PlanEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return t;
}

TransportPlan diagonal_plan(const DiscreteMeasure& mu, CostExponent p) {
  TransportPlan plan;
  plan.n_source = plan.n_target = mu.size();
  plan.p = p;
  plan.entries.reserve(static_cast<std::size_t>(mu.size()));
  for (Index k = 0; k < mu.size(); ++k) plan.entries.push_back({k, k, mu.weights()[k]});
  return plan;
}

double plan_cost(const TransportPlan& plan, const Matrix& cost) {
  KahanSum total;
  for (const auto& e : plan.entries) total.add(e.mass * cost(e.row, e.col));
  return total.value();
}

Vector plan_row_sums(const TransportPlan& plan) {
  Vector sums = Vector::Zero(plan.n_source);
  for (const auto& e : plan.entries) sums[e.row] += e.mass;
  return sums;
}

Vector plan_col_sums(const TransportPlan& plan) {
  Vector sums = Vector::Zero(plan.n_target);
  for (const auto& e : plan.entries) sums[e.col] += e.mass;
  return sums;
}

void check_plan_marginals(const TransportPlan& plan, const DiscreteMeasure& mu,
                          const DiscreteMeasure& nu, double tol) {
  if (plan.n_source != mu.size() || plan.n_target != nu.size())
    throw ValidationError("plan shape does not match the measures");
  const Vector rows = plan_row_sums(plan);
  const Vector cols = plan_col_sums(plan);
  const double row_err = (rows - mu.weights()).cwiseAbs().maxCoeff();
  const double col_err = (cols - nu.weights()).cwiseAbs().maxCoeff();
  if (row_err > tol || col_err > tol)
    throw ValidationError("plan marginals deviate by " +
                          std::to_string(std::max(row_err, col_err)));
}

double wasserstein_objective(const DiscreteMeasure& nu, const Problem& problem,
                             const OtOptions& options) {
  if (nu.dim() != problem_dim(problem))
    throw ValidationError("candidate measure dimension does not match the problem");
  const std::size_t n = problem.measures.size();
  std::vector<double> costs(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    costs[i] = solve_ot(nu, problem.measures[i], problem.p, options).cost;
  });
  KahanSum total;
  for (std::size_t i = 0; i < n; ++i)
    total.add(problem.weights[static_cast<Index>(i)] * costs[i]);
  return total.value();
}

}  // namespace wbary
