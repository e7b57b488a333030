#pragma once

#include <Eigen/Dense>
#include <optional>

// Small dense LP solver (two-phase primal simplex, Bland's rule).
// Used for cross-metric steps in the embedding searches and as the
// dense oracle fallback in tests. Not meant for large instances.

namespace mmgeo::lp {

struct Problem {
  // minimize c^T x  s.t.  A x <= b,  x >= 0
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

struct Solution {
  Eigen::VectorXd x;
  double value = 0.0;
  bool optimal = false;
  bool unbounded = false;
  bool infeasible = false;
};

Solution solve(const Problem& p, double tol = 1e-11, int max_pivots = 200000);

}  // namespace mmgeo::lp
