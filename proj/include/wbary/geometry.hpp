#pragma once

#include "wbary/types.hpp"

#include <utility>
#include <vector>

namespace wbary {

// Points with strictly positive masses that sum to one (within 1e-9). Feeds
// the per-atom aggregation maps.
struct WeightedPointSet {
  Matrix points;
  Vector masses;

  WeightedPointSet(Matrix pts, Vector m);

  Index size() const { return points.rows(); }
  Index dim() const { return points.cols(); }
};

// sum_i w_i x_i.
Vector weighted_mean(const WeightedPointSet& ps);

// f(y) = sum_i w_i ||x_i - y||.
double median_objective(const WeightedPointSet& ps, const Vector& y);

// sum_{i<j} w_i w_j ||x_i - x_j||; a lower bound for min_y f(y).
double median_lower_bound(const WeightedPointSet& ps);

// True when the points lie on one line: second singular value of the
// centered point matrix at most tol times the first.
bool collinear(const Matrix& points, double tol = 1e-10);

struct MedianResult {
  Vector point;
  double value = 0.0;            // f at point, recomputed
  double certified_ratio = 1.0;  // value <= certified_ratio * min f when certified
  bool certified = false;
  int iterations = 0;
  std::vector<double> trace;     // f per Weiszfeld iterate, starting value first
};

// Weighted geometric median.
//
// Collinear inputs (which includes everything in dimension one) are reduced
// to the exact one-dimensional weighted median; an ambiguous minimizer
// segment yields its midpoint. Otherwise Weiszfeld's iteration runs from the
// weighted mean and stops as soon as f(m) <= (1 + eps) * LB with
// LB = median_lower_bound, or when the relative decrease drops below 1e-12,
// or after max_iter steps. A start or iterate that lands on an input point
// is either returned (when the subgradient condition certifies it optimal)
// or nudged along the descent direction by 1e-9 times the diameter.
MedianResult geometric_median(const WeightedPointSet& ps, double eps, int max_iter = 10000);

// Exact weighted median of collinear points; midpoint of the minimizer
// segment when the cumulative mass hits 1/2 exactly at an atom. Throws on
// non-collinear input.
Vector ambiguous_median_midpoint(const WeightedPointSet& ps);

// Both sides of sum_i w_i ||x_i - y||^2 = ||m - y||^2 + sum_i w_i ||x_i - m||^2
// with m the weighted mean.
std::pair<double, double> identity_check_sunflower(const Matrix& points, const Vector& weights,
                                                   const Vector& y);

// Both sides of sum_i w_i ||x_i - m||^2 = sum_{i<j} w_i w_j ||x_i - x_j||^2.
std::pair<double, double> identity_check_star(const Matrix& points, const Vector& weights);

// (sum_i w_i ||x_i - y||, sum_{i<j} w_i w_j ||x_i - x_j||); lhs >= rhs.
std::pair<double, double> w1_lower_bound_check(const Matrix& points, const Vector& weights,
                                               const Vector& y);

}  // namespace wbary
