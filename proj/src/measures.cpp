#include "wbary/measures.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace wbary {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

DiscreteMeasure::DiscreteMeasure(Matrix points, Vector weights) {
  if (points.rows() == 0) throw ValidationError("measure needs at least one atom");
  if (points.cols() < 1) throw ValidationError("measure needs dimension >= 1");
  if (points.rows() != weights.size())
    throw ValidationError("measure has " + std::to_string(points.rows()) + " atoms but " +
                          std::to_string(weights.size()) + " weights");
  if (!all_finite(points)) throw ValidationError("measure has non-finite coordinates");
  if (!weights.allFinite()) throw ValidationError("measure has non-finite weights");
  if ((weights.array() < 0.0).any()) throw ValidationError("measure has negative weights");

  const Index n = points.rows();
  const Index d = points.cols();

  // Merge bit-identical duplicate locations, keeping first-occurrence order,
  // and drop zero-mass atoms.
  std::map<std::vector<double>, Index> seen;
  std::vector<Index> keep;
  std::vector<double> merged;
  keep.reserve(n);
  merged.reserve(n);
  std::vector<double> key(static_cast<std::size_t>(d));
  for (Index k = 0; k < n; ++k) {
    if (weights[k] == 0.0) continue;
    for (Index j = 0; j < d; ++j) key[static_cast<std::size_t>(j)] = points(k, j);
    auto [it, inserted] = seen.emplace(key, static_cast<Index>(keep.size()));
    if (inserted) {
      keep.push_back(k);
      merged.push_back(weights[k]);
    } else {
      merged[static_cast<std::size_t>(it->second)] += weights[k];
    }
  }
  if (keep.empty()) throw ValidationError("measure has zero total mass");

  points_.resize(static_cast<Index>(keep.size()), d);
  weights_.resize(static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    points_.row(static_cast<Index>(i)) = points.row(keep[i]);
    weights_[static_cast<Index>(i)] = merged[i];
  }

  const double total = stable_sum(weights_);
  if (!(total > 0.0) || !std::isfinite(total))
    throw ValidationError("measure has invalid total mass");
  weights_ /= total;
}

DiscreteMeasure dirac(const Vector& x) {
  Matrix pts(1, x.size());
  pts.row(0) = x.transpose();
  Vector w(1);
  w[0] = 1.0;
  return DiscreteMeasure(std::move(pts), std::move(w));
}

bool measures_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
  if (a.size() != b.size() || a.dim() != b.dim()) return false;
  if (((a.points() - b.points()).array().abs() > tol).any()) return false;
  return ((a.weights() - b.weights()).array().abs() <= tol).all();
}

Weights::Weights(Vector lambda) : lambda_(std::move(lambda)) {
  if (lambda_.size() < 1) throw ValidationError("weight vector is empty");
  if (!lambda_.allFinite()) throw ValidationError("weight vector has non-finite entries");
  if ((lambda_.array() <= 0.0).any())
    throw ValidationError("barycenter weights must be strictly positive");
  const double total = stable_sum(lambda_);
  if (!(total > 0.0)) throw ValidationError("weight vector has nonpositive sum");
  lambda_ /= total;
}

Weights Weights::uniform(Index n) {
  return Weights(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Problem make_problem(std::vector<DiscreteMeasure> measures, Weights weights, CostExponent p) {
  if (measures.size() < 2) throw ValidationError("a problem needs at least two measures");
  if (weights.size() != static_cast<Index>(measures.size()))
    throw ValidationError("weight count " + std::to_string(weights.size()) +
                          " does not match measure count " + std::to_string(measures.size()));
  const Index d = measures.front().dim();
  for (const auto& mu : measures)
    if (mu.dim() != d) throw ValidationError("measures have mixed ambient dimensions");
  return Problem{std::move(measures), std::move(weights), p};
}

Index problem_dim(const Problem& problem) { return problem.measures.front().dim(); }

Index total_support_size(const Problem& problem) {
  Index total = 0;
  for (const auto& mu : problem.measures) total += mu.size();
  return total;
}

DiscreteMeasure mixture(const Problem& problem) {
  const Index total = total_support_size(problem);
  Matrix pts(total, problem_dim(problem));
  Vector w(total);
  Index row = 0;
  for (std::size_t i = 0; i < problem.measures.size(); ++i) {
    const auto& mu = problem.measures[i];
    const double lambda = problem.weights[static_cast<Index>(i)];
    pts.middleRows(row, mu.size()) = mu.points();
    w.segment(row, mu.size()) = lambda * mu.weights();
    row += mu.size();
  }
  return DiscreteMeasure(std::move(pts), std::move(w));
}

}  // namespace wbary
