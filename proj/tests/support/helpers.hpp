#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mmgeo/rng.hpp"
#include "mmgeo/space.hpp"

// Shared test fixtures and independent oracles. Everything here stays off the
// library's solver paths on purpose.

namespace testutil {

using mmgeo::FinitePmmSpace;
using mmgeo::Rng;

// space from random points in [0,1]^dim with random masses
inline FinitePmmSpace random_euclidean_space(int n, int dim, Rng& rng,
                                             bool probability = false) {
  Eigen::MatrixXd pts(n, dim);
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < dim; ++d) pts(i, d) = rng.uniform();
  FinitePmmSpace s;
  s.dist.resize(n, n);
  s.mass.resize(n);
  for (int i = 0; i < n; ++i) {
    s.mass(i) = 0.1 + rng.uniform();
    for (int j = 0; j < n; ++j) s.dist(i, j) = (pts.row(i) - pts.row(j)).norm();
  }
  if (probability) s.mass /= s.mass.sum();
  s.base = static_cast<int>(rng.below(n));
  return s;
}

inline FinitePmmSpace point_space(double mass = 1.0) {
  FinitePmmSpace p;
  p.dist = Eigen::MatrixXd::Zero(1, 1);
  p.mass = Eigen::VectorXd::Constant(1, mass);
  p.base = 0;
  return p;
}

inline FinitePmmSpace two_point_space(double d, double m0, double m1, int base = 0) {
  FinitePmmSpace s;
  s.dist.resize(2, 2);
  s.dist << 0, d, d, 0;
  s.mass.resize(2);
  s.mass << m0, m1;
  s.base = base;
  return s;
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.below(i + 1)]);
  return p;
}

inline Eigen::VectorXd random_probability(int n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = 0.05 + rng.uniform();
  return v / v.sum();
}

// brute-force check of every triangle inequality (independent of the kernel)
inline bool triangles_ok(const Eigen::MatrixXd& d, double slack) {
  const int n = static_cast<int>(d.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (d(i, k) > d(i, j) + d(j, k) + slack) return false;
  return true;
}

// exhaustive OT oracle: enumerates all spanning-tree bases of the transport
// polytope and minimizes over the feasible basic solutions. Exponential; only
// for tiny instances.
double ot_oracle(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                 const Eigen::MatrixXd& cost);

// exact minimal number of eps-balls covering all points (exponential set cover)
int exact_cover_oracle(const Eigen::MatrixXd& dist, const std::vector<int>& pts, double eps);

}  // namespace testutil
