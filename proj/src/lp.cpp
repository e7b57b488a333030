#include "mmgeo/lp.hpp"

#include <cmath>
#include <vector>

namespace mmgeo::lp {

namespace {

// dense simplex on a tableau in standard equality form with a basis of
// slack/artificial columns; Bland's rule throughout
struct Tableau {
  Eigen::MatrixXd T;       // (rows+1) x (cols+1), price row last, rhs column last
  std::vector<int> basis;  // basic variable per row
  int rows, cols;
  int priceable;  // columns >= priceable never enter (artificials in phase 2)
  bool unbounded = false;

  void pivot(int pr, int pc) {
    T.row(pr) /= T(pr, pc);
    for (int r = 0; r <= rows; ++r) {
      if (r == pr) continue;
      const double factor = T(r, pc);
      if (factor != 0.0) T.row(r) -= factor * T.row(pr);
    }
    basis[pr] = pc;
  }

  // one Bland step; returns false at optimality (or when unbounded)
  bool step(double tol) {
    int pc = -1;
    for (int c = 0; c < priceable; ++c)
      if (T(rows, c) < -tol) {
        pc = c;
        break;
      }
    if (pc < 0) return false;
    int pr = -1;
    double best = 0.0;
    for (int r = 0; r < rows; ++r) {
      if (T(r, pc) > tol) {
        const double ratio = T(r, cols) / T(r, pc);
        if (pr < 0 || ratio < best - 1e-300 || (ratio <= best && basis[r] < basis[pr])) {
          best = ratio;
          pr = r;
        }
      }
    }
    if (pr < 0) {
      unbounded = true;
      return false;
    }
    pivot(pr, pc);
    return true;
  }
};

}  // namespace

Solution solve(const Problem& p, double tol, int max_pivots) {
  const int n = static_cast<int>(p.c.size());
  const int m = static_cast<int>(p.b.size());
  Solution sol;

  // equality form A x + s = b with b >= 0; negated rows get artificials
  // (their slack keeps coefficient -1 after negation)
  Eigen::MatrixXd A = p.A;
  Eigen::VectorXd b = p.b;
  std::vector<int> art_rows;
  for (int r = 0; r < m; ++r)
    if (b(r) < 0) {
      A.row(r) *= -1.0;
      b(r) *= -1.0;
      art_rows.push_back(r);
    }

  const int n_art = static_cast<int>(art_rows.size());
  const int total = n + m + n_art;
  Tableau tab;
  tab.rows = m;
  tab.cols = total;
  tab.priceable = total;
  tab.T = Eigen::MatrixXd::Zero(m + 1, total + 1);
  tab.basis.resize(m);
  tab.T.block(0, 0, m, n) = A;
  for (int r = 0; r < m; ++r) {
    tab.T(r, total) = b(r);
    tab.T(r, n + r) = 1.0;
    tab.basis[r] = n + r;
  }
  for (const int r : art_rows) tab.T(r, n + r) = -1.0;
  for (int a = 0; a < n_art; ++a) {
    tab.T(art_rows[a], n + m + a) = 1.0;
    tab.basis[art_rows[a]] = n + m + a;
  }

  int pivots = 0;
  if (n_art > 0) {
    // phase 1: minimize the artificial sum; price row = costs with the
    // basic (artificial) columns eliminated
    for (int a = 0; a < n_art; ++a) tab.T(m, n + m + a) = 1.0;
    for (const int r : art_rows) tab.T.row(m) -= tab.T.row(r);
    while (tab.step(tol)) {
      if (++pivots > max_pivots) return sol;
    }
    if (-tab.T(m, total) > 1e-7) {
      sol.infeasible = true;
      return sol;
    }
    // drive leftover zero-level artificials out of the basis where possible;
    // rows that cannot pivot are all-zero on real columns and stay inert
    for (int r = 0; r < m; ++r) {
      if (tab.basis[r] >= n + m) {
        for (int c = 0; c < n + m; ++c)
          if (std::abs(tab.T(r, c)) > tol) {
            tab.pivot(r, c);
            break;
          }
      }
    }
    tab.T.row(m).setZero();
  }

  // phase 2: real objective, artificial columns barred from entering
  tab.priceable = n + m;
  for (int c = 0; c < n; ++c) tab.T(m, c) = p.c(c);
  for (int r = 0; r < m; ++r)
    if (tab.basis[r] < n) tab.T.row(m) -= tab.T(m, tab.basis[r]) * tab.T.row(r);

  while (tab.step(tol)) {
    if (++pivots > max_pivots) return sol;
  }
  if (tab.unbounded) {
    sol.unbounded = true;
    return sol;
  }

  sol.x = Eigen::VectorXd::Zero(n);
  for (int r = 0; r < m; ++r)
    if (tab.basis[r] < n) sol.x(tab.basis[r]) = tab.T(r, total);
  sol.value = p.c.dot(sol.x);
  sol.optimal = true;
  return sol;
}

}  // namespace mmgeo::lp
