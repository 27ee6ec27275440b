#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace wbary {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Cost exponent p in c_p(x, y) = ||x - y||^p.
enum class CostExponent : int { p1 = 1, p2 = 2 };

inline int exponent(CostExponent p) { return static_cast<int>(p); }

inline CostExponent cost_exponent_from_int(int p) {
  if (p == 1) return CostExponent::p1;
  if (p == 2) return CostExponent::p2;
  throw std::invalid_argument("cost exponent must be 1 or 2, got " + std::to_string(p));
}

// ||x - y||^p from the Euclidean distance.
inline double power_cost(double dist, CostExponent p) {
  return p == CostExponent::p1 ? dist : dist * dist;
}

// Rejected input or a broken call contract.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure inside a solver (e.g. pivot budget exhausted).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Compensated (Kahan) summation; keeps normalization errors near one ulp
// independently of the number of atoms.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline double stable_sum(const Vector& v) {
  KahanSum s;
  for (Index i = 0; i < v.size(); ++i) s.add(v[i]);
  return s.value();
}

}  // namespace wbary
