#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mmgeo/lab.hpp"
#include "mmgeo/rng.hpp"

namespace mmgeo::lab {

namespace {

// distortion of a map restricted to the ball of radius R around the base
double map_distortion(const FinitePmmSpace& a, const FinitePmmSpace& b,
                      const std::vector<int>& f, double R) {
  double worst = 0.0;
  for (int x = 0; x < a.n(); ++x) {
    if (a.dist(x, a.base) > R || a.mass(x) <= 0.0) continue;
    for (int y = x; y < a.n(); ++y) {
      if (a.dist(y, a.base) > R || a.mass(y) <= 0.0) continue;
      worst = std::max(worst, std::abs(a.dist(x, y) - b.dist(f[x], f[y])));
    }
  }
  return worst;
}

// measured side: gaps of tent test integrals under the pushforward
double measure_gap(const FinitePmmSpace& a, const FinitePmmSpace& b, const std::vector<int>& f,
                   double R) {
  double worst = 0.0;
  for (int c = 0; c < b.n(); ++c) {
    if (b.mass(c) <= 0.0) continue;
    for (double s : {R, 0.5 * R, 0.25 * R}) {
      if (s <= 0) continue;
      double push = 0.0, there = 0.0;
      for (int x = 0; x < a.n(); ++x)
        push += std::max(0.0, 1.0 - b.dist(f[x], c) / s) * a.mass(x);
      for (int y = 0; y < b.n(); ++y)
        there += std::max(0.0, 1.0 - b.dist(y, c) / s) * b.mass(y);
      worst = std::max(worst, std::abs(push - there));
    }
  }
  return worst;
}

double score(const FinitePmmSpace& a, const FinitePmmSpace& b, const std::vector<int>& f,
             double R) {
  return std::max(map_distortion(a, b, f, R), measure_gap(a, b, f, R));
}

}  // namespace

PmghReport pmgh_compare(const FinitePmmSpace& a, const FinitePmmSpace& b,
                        const PmghOptions& opt) {
  PmghReport rep;
  const double R = std::max({a.radius_from_base(), b.radius_from_base(), 1e-12});

  // Lower bound: any eps-map must match every realized distance in the ball
  // against some distance of the target within eps (one-sided necessity).
  {
    double lower = 0.0;
    for (int x = 0; x < a.n(); ++x) {
      if (a.mass(x) <= 0.0) continue;
      for (int y = x + 1; y < a.n(); ++y) {
        if (a.mass(y) <= 0.0) continue;
        const double d = a.dist(x, y);
        double nearest = std::numeric_limits<double>::infinity();
        for (int u = 0; u < b.n(); ++u)
          for (int v = 0; v < b.n(); ++v)
            nearest = std::min(nearest, std::abs(d - b.dist(u, v)));
        lower = std::max(lower, nearest);
      }
    }
    // and symmetrically (coverage of the target ball near the base)
    for (int u = 0; u < b.n(); ++u) {
      if (b.mass(u) <= 0.0) continue;
      for (int v = u + 1; v < b.n(); ++v) {
        if (b.mass(v) <= 0.0) continue;
        const double d = b.dist(u, v);
        double nearest = std::numeric_limits<double>::infinity();
        for (int x = 0; x < a.n(); ++x)
          for (int y = 0; y < a.n(); ++y)
            nearest = std::min(nearest, std::abs(d - a.dist(x, y)));
        // a missing target distance forces eps >= gap/2 via the coverage
        // condition rather than the distortion; halve to stay certified
        lower = std::max(lower, 0.5 * nearest);
      }
    }
    rep.lower = lower;
  }

  if (a.n() > opt.cap || b.n() > opt.cap) {
    rep.bracket_only = true;
    rep.upper = std::numeric_limits<double>::infinity();
    return rep;
  }

  // Upper bound: greedy base-fixing map, then random single-point remaps.
  std::vector<int> f(a.n(), b.base);
  std::vector<int> order;
  for (int x = 0; x < a.n(); ++x)
    if (x != a.base) order.push_back(x);
  std::sort(order.begin(), order.end(),
            [&](int x, int y) { return a.dist(x, a.base) < a.dist(y, a.base); });
  f[a.base] = b.base;
  std::vector<int> placed{a.base};
  for (int x : order) {
    double best = std::numeric_limits<double>::infinity();
    int arg = b.base;
    for (int u = 0; u < b.n(); ++u) {
      double worst = 0.0;
      for (int p : placed) worst = std::max(worst, std::abs(a.dist(x, p) - b.dist(u, f[p])));
      if (worst < best) {
        best = worst;
        arg = u;
      }
    }
    f[x] = arg;
    placed.push_back(x);
  }

  double current = score(a, b, f, R);
  Rng rng(opt.seed);
  for (int it = 0; it < opt.local_search_iters; ++it) {
    const int x = static_cast<int>(rng.below(a.n()));
    if (x == a.base) continue;
    const int save = f[x];
    const int u = static_cast<int>(rng.below(b.n()));
    if (u == save) continue;
    f[x] = u;
    const double cand = score(a, b, f, R);
    if (cand < current) {
      current = cand;
    } else {
      f[x] = save;
    }
  }
  rep.upper = current;
  rep.lower = std::min(rep.lower, rep.upper);
  return rep;
}

}  // namespace mmgeo::lab
