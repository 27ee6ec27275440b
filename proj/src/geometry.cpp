#include "wbary/geometry.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>

namespace wbary {

WeightedPointSet::WeightedPointSet(Matrix pts, Vector m)
    : points(std::move(pts)), masses(std::move(m)) {
  if (points.rows() < 1) throw ValidationError("point set is empty");
  if (points.rows() != masses.size()) throw ValidationError("point/mass count mismatch");
  if (!points.allFinite() || !masses.allFinite())
    throw ValidationError("point set has non-finite data");
  if ((masses.array() <= 0.0).any()) throw ValidationError("point set has nonpositive mass");
  const double total = stable_sum(masses);
  if (std::abs(total - 1.0) > 1e-9)
    throw ValidationError("point set masses sum to " + std::to_string(total));
}

Vector weighted_mean(const WeightedPointSet& ps) {
  return (ps.points.transpose() * ps.masses) / ps.masses.sum();
}

double median_objective(const WeightedPointSet& ps, const Vector& y) {
  KahanSum f;
  for (Index i = 0; i < ps.size(); ++i)
    f.add(ps.masses[i] * (ps.points.row(i).transpose() - y).norm());
  return f.value();
}

double median_lower_bound(const WeightedPointSet& ps) {
  KahanSum lb;
  for (Index i = 0; i < ps.size(); ++i)
    for (Index j = i + 1; j < ps.size(); ++j)
      lb.add(ps.masses[i] * ps.masses[j] * (ps.points.row(i) - ps.points.row(j)).norm());
  return lb.value();
}

bool collinear(const Matrix& points, double tol) {
  if (points.cols() == 1 || points.rows() <= 2) return true;
  Matrix centered = points.rowwise() - points.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(centered);
  const auto& s = svd.singularValues();
  if (s.size() < 2) return true;
  return s[1] <= tol * s[0];
}

namespace {

double diameter(const Matrix& points) {
  double diam = 0.0;
  for (Index i = 0; i < points.rows(); ++i)
    for (Index j = i + 1; j < points.rows(); ++j)
      diam = std::max(diam, (points.row(i) - points.row(j)).norm());
  return diam;
}

// Principal direction of the centered point cloud.
Vector line_direction(const Matrix& points) {
  if (points.cols() == 1) {
    Vector u(1);
    u[0] = 1.0;
    return u;
  }
  Matrix centered = points.rowwise() - points.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  Vector u = svd.matrixV().col(0);
  if (u.cwiseAbs().maxCoeff() == 0.0) u[0] = 1.0;  // all points coincide
  return u;
}

// Exact weighted median on the line through the centroid with direction u.
Vector collinear_median(const WeightedPointSet& ps, const Vector& u) {
  const Vector center = ps.points.colwise().mean().transpose();
  const Index n = ps.size();

  std::vector<std::pair<double, double>> atoms;  // (coordinate, mass)
  atoms.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    atoms.emplace_back((ps.points.row(i).transpose() - center).dot(u), ps.masses[i]);
  std::sort(atoms.begin(), atoms.end());

  // Merge coordinates that coincide up to parsing noise so the cumulative
  // scan sees each location once.
  double scale = std::max(std::abs(atoms.front().first), std::abs(atoms.back().first));
  const double merge_tol = 1e-14 * std::max(1.0, scale);
  std::vector<std::pair<double, double>> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && a.first - merged.back().first <= merge_tol)
      merged.back().second += a.second;
    else
      merged.push_back(a);
  }

  const double total = std::accumulate(merged.begin(), merged.end(), 0.0,
                                       [](double s, const auto& a) { return s + a.second; });
  double cum = 0.0;
  double t = merged.back().first;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    cum += merged[i].second;
    if (std::abs(cum - 0.5 * total) <= 1e-12 * total && i + 1 < merged.size()) {
      // Minimizer segment [t_i, t_{i+1}]; take its midpoint.
      t = 0.5 * (merged[i].first + merged[i + 1].first);
      break;
    }
    if (cum > 0.5 * total) {
      t = merged[i].first;
      break;
    }
  }
  return center + t * u;
}

struct AnchorCheck {
  bool optimal = false;
  Vector descent;  // unit direction that decreases f when not optimal
};

// Subgradient test at input point a: the location is a minimizer iff the
// pull of the remaining points does not exceed the mass sitting there.
// Entries at bit-identical coordinates count toward that mass (target
// collections may list one location several times).
AnchorCheck anchor_optimality(const WeightedPointSet& ps, Index a) {
  Vector pull = Vector::Zero(ps.dim());
  double anchor_mass = ps.masses[a];
  for (Index i = 0; i < ps.size(); ++i) {
    if (i == a) continue;
    const Vector diff = ps.points.row(i).transpose() - ps.points.row(a).transpose();
    const double dist = diff.norm();
    if (dist > 0.0)
      pull += ps.masses[i] / dist * diff;
    else
      anchor_mass += ps.masses[i];
  }
  AnchorCheck check;
  const double strength = pull.norm();
  if (strength <= anchor_mass) {
    check.optimal = true;
  } else {
    check.descent = pull / strength;
  }
  return check;
}

}  // namespace

Vector ambiguous_median_midpoint(const WeightedPointSet& ps) {
  if (!collinear(ps.points))
    throw ValidationError("ambiguous_median_midpoint requires collinear points");
  return collinear_median(ps, line_direction(ps.points));
}

MedianResult geometric_median(const WeightedPointSet& ps, double eps, int max_iter) {
  if (!(eps > 0.0)) throw ValidationError("median accuracy eps must be positive");

  MedianResult result;
  if (ps.size() == 1) {
    result.point = ps.points.row(0).transpose();
    result.certified = true;
    return result;
  }

  if (collinear(ps.points)) {
    result.point = collinear_median(ps, line_direction(ps.points));
    result.value = median_objective(ps, result.point);
    result.certified = true;  // exact one-dimensional solution
    result.certified_ratio = 1.0;
    return result;
  }

  const double lb = median_lower_bound(ps);
  const double diam = diameter(ps.points);
  const double anchor_tol = 1e-12 * std::max(1.0, diam);

  Vector m = weighted_mean(ps);

  // If the start coincides with an input point, either accept it as the
  // optimum or step off it along the descent direction.
  for (Index a = 0; a < ps.size(); ++a) {
    if ((ps.points.row(a).transpose() - m).norm() <= anchor_tol) {
      const AnchorCheck check = anchor_optimality(ps, a);
      if (check.optimal) {
        result.point = ps.points.row(a).transpose();
        result.value = median_objective(ps, result.point);
        result.certified = true;
        result.certified_ratio = 1.0;
        return result;
      }
      m = ps.points.row(a).transpose() + (1e-9 * diam) * check.descent;
      break;
    }
  }

  const double total_mass = stable_sum(ps.masses);
  double f = median_objective(ps, m);
  result.trace.push_back(f);
  int iter = 0;
  int stalled = 0;
  bool certificate = f <= (1.0 + eps) * lb;

  while (!certificate && iter < max_iter) {
    // Weiszfeld step: m <- (sum w_i x_i / d_i) / (sum w_i / d_i). The step
    // length times the coefficient sum is exactly the gradient norm at m.
    Vector numerator = Vector::Zero(ps.dim());
    double denominator = 0.0;
    Index hit_anchor = -1;
    for (Index i = 0; i < ps.size(); ++i) {
      const double dist = (ps.points.row(i).transpose() - m).norm();
      if (dist <= anchor_tol) {
        hit_anchor = i;
        break;
      }
      const double coeff = ps.masses[i] / dist;
      numerator += coeff * ps.points.row(i).transpose();
      denominator += coeff;
    }

    Vector next;
    double gradient_norm = std::numeric_limits<double>::infinity();
    if (hit_anchor >= 0) {
      const AnchorCheck check = anchor_optimality(ps, hit_anchor);
      if (check.optimal) {
        m = ps.points.row(hit_anchor).transpose();
        f = median_objective(ps, m);
        result.trace.push_back(f);
        result.certified = true;
        result.certified_ratio = 1.0;
        result.point = m;
        result.value = f;
        result.iterations = iter;
        return result;
      }
      next = ps.points.row(hit_anchor).transpose() + (1e-9 * diam) * check.descent;
    } else {
      next = numerator / denominator;
      gradient_norm = denominator * (next - m).norm();
    }

    const double f_next = median_objective(ps, next);
    ++iter;
    result.trace.push_back(f_next);
    const double decrease = f - f_next;
    m = next;
    f = f_next;
    certificate = f <= (1.0 + eps) * lb;
    if (certificate) break;

    if (decrease <= 1e-12 * std::max(f, 1e-300)) {
      // The value has stagnated. A leftover gradient means the iterate is
      // crawling along an input point: snap to it when it passes the
      // subgradient test, otherwise give the escape a bounded grace period.
      if (gradient_norm <= 5e-7 * total_mass) break;
      Index nearest = 0;
      double nearest_dist = (ps.points.row(0).transpose() - m).norm();
      for (Index i = 1; i < ps.size(); ++i) {
        const double dist = (ps.points.row(i).transpose() - m).norm();
        if (dist < nearest_dist) {
          nearest_dist = dist;
          nearest = i;
        }
      }
      if (nearest_dist <= 1e-5 * diam && anchor_optimality(ps, nearest).optimal) {
        m = ps.points.row(nearest).transpose();
        f = median_objective(ps, m);
        result.trace.push_back(f);
        result.certified = true;
        result.certified_ratio = 1.0;
        result.point = m;
        result.value = f;
        result.iterations = iter;
        return result;
      }
      if (++stalled > 200) break;
    } else {
      stalled = 0;
    }
  }

  result.point = m;
  result.value = f;
  result.iterations = iter;
  if (certificate) {
    result.certified = true;
    result.certified_ratio = 1.0 + eps;
  } else if (lb > 0.0) {
    // Stopped on stagnation or the iteration budget. f / LB still bounds
    // f / min f, but the requested (1 + eps) certificate did not fire.
    result.certified = false;
    result.certified_ratio = std::max(1.0, f / lb);
  }
  return result;
}

std::pair<double, double> identity_check_sunflower(const Matrix& points, const Vector& weights,
                                                   const Vector& y) {
  const Vector m = (points.transpose() * weights) / weights.sum();
  KahanSum lhs, spread;
  for (Index i = 0; i < points.rows(); ++i) {
    lhs.add(weights[i] * (points.row(i).transpose() - y).squaredNorm());
    spread.add(weights[i] * (points.row(i).transpose() - m).squaredNorm());
  }
  return {lhs.value(), (m - y).squaredNorm() + spread.value()};
}

std::pair<double, double> identity_check_star(const Matrix& points, const Vector& weights) {
  const Vector m = (points.transpose() * weights) / weights.sum();
  KahanSum lhs, rhs;
  for (Index i = 0; i < points.rows(); ++i) {
    lhs.add(weights[i] * (points.row(i).transpose() - m).squaredNorm());
    for (Index j = i + 1; j < points.rows(); ++j)
      rhs.add(weights[i] * weights[j] * (points.row(i) - points.row(j)).squaredNorm());
  }
  return {lhs.value(), rhs.value()};
}

std::pair<double, double> w1_lower_bound_check(const Matrix& points, const Vector& weights,
                                               const Vector& y) {
  KahanSum lhs, rhs;
  for (Index i = 0; i < points.rows(); ++i) {
    lhs.add(weights[i] * (points.row(i).transpose() - y).norm());
    for (Index j = i + 1; j < points.rows(); ++j)
      rhs.add(weights[i] * weights[j] * (points.row(i) - points.row(j)).norm());
  }
  return {lhs.value(), rhs.value()};
}

}  // namespace wbary
