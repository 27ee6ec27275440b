#pragma once

#include "wbary/types.hpp"

#include <vector>

namespace wbary {

// Finitely supported probability measure. Row k of points() is the location
// of atom k, weights()[k] its mass. Construction enforces the invariants
// every downstream routine relies on:
//   - at least one atom, every coordinate finite,
//   - input masses nonnegative and not all zero; zero-mass atoms dropped,
//   - bit-identical duplicate locations merged by summing their masses,
//   - masses rescaled to sum to one.
// Instances are immutable after construction and safe to share across
// threads.
class DiscreteMeasure {
 public:
  DiscreteMeasure(Matrix points, Vector weights);

  Index size() const { return points_.rows(); }
  Index dim() const { return points_.cols(); }
  const Matrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  Eigen::RowVectorXd point(Index k) const { return points_.row(k); }

 private:
  Matrix points_;
  Vector weights_;
};

// Single Dirac mass at x.
DiscreteMeasure dirac(const Vector& x);

// Atom-by-atom comparison in storage order.
bool measures_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol);

// Barycenter weight vector in the open probability simplex: every entry
// strictly positive, entries rescaled to sum to one (input sum must be
// positive and within 1e-12 of 1 after rescaling by construction).
class Weights {
 public:
  explicit Weights(Vector lambda);

  Index size() const { return lambda_.size(); }
  double operator[](Index i) const { return lambda_[i]; }
  const Vector& vector() const { return lambda_; }

  static Weights uniform(Index n);

 private:
  Vector lambda_;
};

struct Problem {
  std::vector<DiscreteMeasure> measures;
  Weights weights;
  CostExponent p;
};

// Validates N >= 2, a common ambient dimension and matching weight length.
Problem make_problem(std::vector<DiscreteMeasure> measures, Weights weights, CostExponent p);

Index problem_dim(const Problem& problem);
Index total_support_size(const Problem& problem);

// The mixture sum_i lambda_i mu^i as a measure (coincident atoms merged).
DiscreteMeasure mixture(const Problem& problem);

}  // namespace wbary
