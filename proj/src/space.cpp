#include "mmgeo/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mmgeo/parallel.hpp"

namespace mmgeo {

double FinitePmmSpace::radius_from_base() const {
  double r = 0.0;
  for (int i = 0; i < n(); ++i)
    if (mass(i) > 0.0) r = std::max(r, dist(i, base));
  return r;
}

double FinitePmmSpace::min_positive_base_dist() const {
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n(); ++i)
    if (mass(i) > 0.0 && dist(i, base) > 0.0) r = std::min(r, dist(i, base));
  return r;
}

std::vector<int> FinitePmmSpace::support() const {
  std::vector<int> idx;
  for (int i = 0; i < n(); ++i)
    if (mass(i) > 0.0) idx.push_back(i);
  return idx;
}

ValidationReport validate(const FinitePmmSpace& space) {
  ValidationReport rep;
  const int n = space.n();
  if (space.dist.rows() != n || space.dist.cols() != n) {
    rep.issues.push_back({"dist shape does not match mass length", -1, -1, -1, 0.0});
    return rep;
  }
  if (n == 0) {
    rep.issues.push_back({"empty space", -1, -1, -1, 0.0});
    return rep;
  }
  if (space.base < 0 || space.base >= n) {
    rep.issues.push_back({"base index out of range", space.base, -1, -1, 0.0});
    return rep;
  }
  for (int i = 0; i < n; ++i) {
    if (space.dist(i, i) != 0.0)
      rep.issues.push_back({"nonzero diagonal", i, i, -1, space.dist(i, i)});
    if (space.mass(i) < 0.0) rep.issues.push_back({"negative mass", i, -1, -1, space.mass(i)});
    for (int j = i + 1; j < n; ++j) {
      if (space.dist(i, j) != space.dist(j, i))
        rep.issues.push_back({"asymmetric distance", i, j, -1, space.dist(i, j) - space.dist(j, i)});
      if (space.dist(i, j) < 0.0)
        rep.issues.push_back({"negative distance", i, j, -1, space.dist(i, j)});
    }
  }
  const double diam = space.dist.maxCoeff();
  const double slack = 1e-9 * std::max(diam, 1e-30);
  auto tv = par::max_triangle_violation(space.dist);
  if (tv.max_excess > slack)
    rep.issues.push_back({"triangle violation", tv.i, tv.j, tv.k, tv.max_excess});
  if (space.mass.maxCoeff() <= 0.0)
    rep.issues.push_back({"no strictly positive mass", -1, -1, -1, 0.0});
  else if (space.mass(space.base) <= 0.0)
    rep.issues.push_back({"basepoint outside support", space.base, -1, -1, space.mass(space.base)});
  return rep;
}

void require_valid(const FinitePmmSpace& space, const char* where) {
  auto rep = validate(space);
  if (!rep.ok())
    throw std::invalid_argument(std::string(where) + ": invalid space: " + rep.issues[0].what);
}

FinitePmmSpace support_restrict(const FinitePmmSpace& space) {
  const auto idx = space.support();
  const int m = static_cast<int>(idx.size());
  FinitePmmSpace out;
  out.dist.resize(m, m);
  out.mass.resize(m);
  for (int a = 0; a < m; ++a) {
    out.mass(a) = space.mass(idx[a]);
    for (int b = 0; b < m; ++b) out.dist(a, b) = space.dist(idx[a], idx[b]);
    if (idx[a] == space.base) out.base = a;
  }
  return out;
}

CutoffSpec CutoffSpec::linear() {
  CutoffSpec z;
  z.eval = [](double r) { return std::min(1.0, std::max(0.0, 2.0 - r)); };
  z.lipschitz = 1.0;
  return z;
}

FinitePmmSpace cutoff_rescale(const FinitePmmSpace& space, int k, const CutoffSpec& zeta) {
  FinitePmmSpace out = space;
  const double scale = std::ldexp(1.0, -k);  // 2^-k
  for (int i = 0; i < space.n(); ++i)
    out.mass(i) = zeta.eval(space.dist(i, space.base) * scale) * space.mass(i);
  return out;
}

ReweightResult reweight(const FinitePmmSpace& space, const WeightSpec& psi) {
  double z = 0.0;
  Eigen::VectorXd w(space.n());
  for (int i = 0; i < space.n(); ++i) {
    w(i) = psi(space.dist(i, space.base)) * space.mass(i);
    z += w(i);
  }
  ReweightResult out{z, space};
  out.space.mass = w / z;
  return out;
}

ReweightResult exp_tilt(const FinitePmmSpace& space, double C) {
  if (C <= 0.0) throw std::invalid_argument("exp_tilt: C must be positive");
  double z = 0.0;
  Eigen::VectorXd w(space.n());
  for (int i = 0; i < space.n(); ++i) {
    const double d = space.dist(i, space.base);
    w(i) = std::exp(-C * d * d) * space.mass(i);
    z += w(i);
  }
  ReweightResult out{z, space};
  out.space.mass = w / z;
  return out;
}

double ball_mass(const FinitePmmSpace& space, int center, double r) {
  double acc = 0.0;
  for (int j = 0; j < space.n(); ++j)
    if (space.dist(center, j) <= r) acc += space.mass(j);
  return acc;
}

double doubling_constant(const FinitePmmSpace& space, const std::vector<double>& radii) {
  std::vector<double> both;
  both.reserve(2 * radii.size());
  for (double r : radii) {
    both.push_back(r);
    both.push_back(2.0 * r);
  }
  const auto masses = par::ball_mass_sweep(space.dist, space.mass, both);
  double c = 1.0;
  for (int i = 0; i < space.n(); ++i) {
    if (space.mass(i) <= 0.0) continue;
    for (std::size_t r = 0; r < radii.size(); ++r) {
      const double small = masses(i, 2 * r);
      const double big = masses(i, 2 * r + 1);
      if (small > 0.0) c = std::max(c, big / small);
    }
  }
  return c;
}

int covering_number(const FinitePmmSpace& space, double eps, double subset_radius) {
  if (eps <= 0.0) throw std::invalid_argument("covering_number: eps must be positive");
  std::vector<int> todo;
  for (int i : space.support())
    if (space.dist(i, space.base) <= subset_radius) todo.push_back(i);
  int count = 0;
  std::vector<bool> covered(space.n(), false);
  // greedy: next center = uncovered point covering the most uncovered points
  while (true) {
    int best = -1, best_gain = 0;
    for (int c : todo) {
      if (covered[c]) continue;
      int gain = 0;
      for (int p : todo)
        if (!covered[p] && space.dist(c, p) <= eps) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    if (best < 0) break;
    ++count;
    for (int p : todo)
      if (!covered[p] && space.dist(best, p) <= eps) covered[p] = true;
  }
  return count;
}

FinitePmmSpace permute(const FinitePmmSpace& space, const std::vector<int>& perm) {
  const int n = space.n();
  if (static_cast<int>(perm.size()) != n)
    throw std::invalid_argument("permute: permutation size mismatch");
  FinitePmmSpace out;
  out.dist.resize(n, n);
  out.mass.resize(n);
  for (int a = 0; a < n; ++a) {
    out.mass(a) = space.mass(perm[a]);
    for (int b = 0; b < n; ++b) out.dist(a, b) = space.dist(perm[a], perm[b]);
    if (perm[a] == space.base) out.base = a;
  }
  return out;
}

}  // namespace mmgeo
