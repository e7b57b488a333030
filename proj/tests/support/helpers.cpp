#include "helpers.hpp"

#include <algorithm>
#include <limits>

namespace testutil {

namespace {

// basic solution for a candidate basis (set of cells forming a spanning tree
// of the bipartite row/col graph): peel degree-one nodes
bool basic_solution(const std::vector<std::pair<int, int>>& cells, const Eigen::VectorXd& mu,
                    const Eigen::VectorXd& nu, Eigen::MatrixXd& plan) {
  const int m = static_cast<int>(mu.size());
  const int n = static_cast<int>(nu.size());
  plan = Eigen::MatrixXd::Zero(m, n);
  std::vector<double> ru(mu.data(), mu.data() + m), cv(nu.data(), nu.data() + n);
  std::vector<std::pair<int, int>> left = cells;
  while (!left.empty()) {
    bool progressed = false;
    for (std::size_t t = 0; t < left.size(); ++t) {
      const auto [i, j] = left[t];
      int row_deg = 0, col_deg = 0;
      for (const auto& [a, b] : left) {
        if (a == i) ++row_deg;
        if (b == j) ++col_deg;
      }
      if (row_deg == 1) {
        plan(i, j) = ru[i];
        cv[j] -= ru[i];
        ru[i] = 0;
        left.erase(left.begin() + t);
        progressed = true;
        break;
      }
      if (col_deg == 1) {
        plan(i, j) = cv[j];
        ru[i] -= cv[j];
        cv[j] = 0;
        left.erase(left.begin() + t);
        progressed = true;
        break;
      }
    }
    if (!progressed) return false;  // contains a cycle
  }
  return plan.minCoeff() >= -1e-12;
}

}  // namespace

double ot_oracle(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                 const Eigen::MatrixXd& cost) {
  const int m = static_cast<int>(mu.size());
  const int n = static_cast<int>(nu.size());
  const int cells = m * n;
  const int basis_size = m + n - 1;
  std::vector<int> pick(basis_size);
  for (int i = 0; i < basis_size; ++i) pick[i] = i;
  double best = std::numeric_limits<double>::infinity();
  // enumerate all (m n choose m+n-1) candidate bases
  while (true) {
    std::vector<std::pair<int, int>> chosen;
    for (int p : pick) chosen.emplace_back(p / n, p % n);
    Eigen::MatrixXd plan;
    if (basic_solution(chosen, mu, nu, plan)) {
      double v = 0.0;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) v += plan(i, j) * cost(i, j);
      best = std::min(best, v);
    }
    int k = basis_size - 1;
    while (k >= 0 && pick[k] == cells - basis_size + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int t = k + 1; t < basis_size; ++t) pick[t] = pick[t - 1] + 1;
  }
  return best;
}

int exact_cover_oracle(const Eigen::MatrixXd& dist, const std::vector<int>& pts, double eps) {
  const int n = static_cast<int>(pts.size());
  if (n == 0) return 0;
  std::vector<std::uint64_t> ball(n, 0);
  for (int c = 0; c < n; ++c)
    for (int p = 0; p < n; ++p)
      if (dist(pts[c], pts[p]) <= eps) ball[c] |= 1ULL << p;
  const std::uint64_t all = n == 64 ? ~0ULL : (1ULL << n) - 1;
  for (int k = 1; k <= n; ++k) {
    // all k-subsets of centers
    std::vector<int> pick(k);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      std::uint64_t covered = 0;
      for (int p : pick) covered |= ball[p];
      if (covered == all) return k;
      int t = k - 1;
      while (t >= 0 && pick[t] == n - k + t) --t;
      if (t < 0) break;
      ++pick[t];
      for (int s = t + 1; s < k; ++s) pick[s] = pick[s - 1] + 1;
    }
  }
  return n;
}

}  // namespace testutil
