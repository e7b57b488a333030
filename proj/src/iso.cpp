#include <algorithm>
#include <cmath>
#include <vector>

#include "mmgeo/space.hpp"

namespace mmgeo {

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// sorted multiset comparison with tolerance
bool multiset_close(std::vector<double> a, std::vector<double> b, double tol) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!close(a[i], b[i], tol)) return false;
  return true;
}

struct Searcher {
  const FinitePmmSpace& a;
  const FinitePmmSpace& b;
  double tol;
  int n;
  std::vector<int> assign;  // a-index -> b-index
  std::vector<bool> used;
  std::vector<std::vector<int>> candidates;

  bool extend(int i) {
    if (i == n) return true;
    for (int j : candidates[i]) {
      if (used[j]) continue;
      bool ok = true;
      for (int p = 0; p < i; ++p)
        if (!close(a.dist(i, p), b.dist(j, assign[p]), tol)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      assign[i] = j;
      used[j] = true;
      if (extend(i + 1)) return true;
      used[j] = false;
    }
    return false;
  }
};

}  // namespace

IsoResult is_isomorphic(const FinitePmmSpace& a_in, const FinitePmmSpace& b_in,
                        const IsoOptions& opt) {
  IsoResult res;
  const FinitePmmSpace a = support_restrict(a_in);
  const FinitePmmSpace b = support_restrict(b_in);
  const auto sup_a = a_in.support();
  const auto sup_b = b_in.support();
  const double tol = opt.tol;

  if (a.n() != b.n()) {
    res.outcome = IsoOutcome::NotIsomorphic;
    res.certificate = "support sizes differ";
    return res;
  }
  if (!close(a.mass(a.base), b.mass(b.base), tol)) {
    res.outcome = IsoOutcome::NotIsomorphic;
    res.certificate = "basepoint masses differ";
    return res;
  }
  {
    std::vector<double> ma(a.mass.data(), a.mass.data() + a.n());
    std::vector<double> mb(b.mass.data(), b.mass.data() + b.n());
    if (!multiset_close(ma, mb, tol)) {
      res.outcome = IsoOutcome::NotIsomorphic;
      res.certificate = "mass multisets differ";
      return res;
    }
  }
  {
    // joint (distance-to-base, mass) signature
    std::vector<double> da, db;
    for (int i = 0; i < a.n(); ++i) da.push_back(a.dist(i, a.base));
    for (int i = 0; i < b.n(); ++i) db.push_back(b.dist(i, b.base));
    if (!multiset_close(da, db, tol)) {
      res.outcome = IsoOutcome::NotIsomorphic;
      res.certificate = "base-distance multisets differ";
      return res;
    }
  }
  if (a.n() > opt.max_support) {
    res.outcome = IsoOutcome::Undecided;
    res.certificate = "support larger than search cap";
    return res;
  }

  // order rows by (mass, base distance) signature buckets to prune early;
  // the base is pinned first
  std::vector<int> order(a.n());
  for (int i = 0; i < a.n(); ++i) order[i] = i;
  std::swap(order[0], order[a.base]);
  std::stable_sort(order.begin() + 1, order.end(), [&](int x, int y) {
    if (a.mass(x) != a.mass(y)) return a.mass(x) < a.mass(y);
    return a.dist(x, a.base) < a.dist(y, a.base);
  });
  FinitePmmSpace ap = permute(a, order);

  Searcher s{ap, b, tol, ap.n(), std::vector<int>(ap.n(), -1),
             std::vector<bool>(b.n(), false), {}};
  s.candidates.resize(ap.n());
  for (int i = 0; i < ap.n(); ++i) {
    for (int j = 0; j < b.n(); ++j) {
      if (i == ap.base && j != b.base) continue;
      if (i != ap.base && j == b.base) continue;
      if (!close(ap.mass(i), b.mass(j), tol)) continue;
      if (!close(ap.dist(i, ap.base), b.dist(j, b.base), tol)) continue;
      s.candidates[i].push_back(j);
    }
    if (s.candidates[i].empty()) {
      res.outcome = IsoOutcome::NotIsomorphic;
      res.certificate = "point with unmatched (mass, base-distance) signature";
      return res;
    }
  }

  if (s.extend(0)) {
    res.outcome = IsoOutcome::Isomorphic;
    for (int i = 0; i < ap.n(); ++i)
      res.witness.emplace_back(sup_a[order[i]], sup_b[s.assign[i]]);
    std::sort(res.witness.begin(), res.witness.end());
    return res;
  }
  res.outcome = IsoOutcome::NotIsomorphic;
  res.certificate = "exhausted base-fixing bijection search";
  return res;
}

}  // namespace mmgeo
