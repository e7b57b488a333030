#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mmgeo/gromov.hpp"
#include "mmgeo/parallel.hpp"

namespace mmgeo::gromov {

Eigen::MatrixXd GluedSpace::block_matrix() const {
  const int n1 = a.n(), n2 = b.n();
  Eigen::MatrixXd d(n1 + n2, n1 + n2);
  d.topLeftCorner(n1, n1) = a.dist;
  d.bottomRightCorner(n2, n2) = b.dist;
  d.topRightCorner(n1, n2) = cross;
  d.bottomLeftCorner(n2, n1) = cross.transpose();
  return d;
}

FinitePmmSpace GluedSpace::as_space() const {
  FinitePmmSpace s;
  s.dist = block_matrix();
  s.mass.resize(a.n() + b.n());
  s.mass << a.mass, b.mass;
  s.base = a.base;
  return s;
}

GluedSpace glue_by_coupling(const FinitePmmSpace& a, const FinitePmmSpace& b,
                            const Eigen::MatrixXd& coupling) {
  if (coupling.rows() != a.n() || coupling.cols() != b.n())
    throw std::invalid_argument("glue_by_coupling: coupling shape mismatch");
  const double thresh = 1e-15 * std::max(1e-300, coupling.maxCoeff());
  std::vector<std::pair<int, int>> link;
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < b.n(); ++j)
      if (coupling(i, j) > thresh) link.emplace_back(i, j);
  if (link.empty()) throw std::invalid_argument("glue_by_coupling: empty coupling support");

  // smallest slack making every cross triangle valid: half the distortion of
  // the coupling support as a correspondence
  double distortion = 0.0;
  for (std::size_t p = 0; p < link.size(); ++p)
    for (std::size_t q = p; q < link.size(); ++q) {
      const double gap = std::abs(a.dist(link[p].first, link[q].first) -
                                  b.dist(link[p].second, link[q].second));
      distortion = std::max(distortion, gap);
    }
  const double eta = 0.5 * distortion;

  GluedSpace g;
  g.a = a;
  g.b = b;
  g.eta = eta;
  g.cross.resize(a.n(), b.n());
  for (int i = 0; i < a.n(); ++i)
    for (int j = 0; j < b.n(); ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& [ii, jj] : link)
        best = std::min(best, a.dist(i, ii) + eta + b.dist(jj, j));
      g.cross(i, j) = best;
    }
  return g;
}

}  // namespace mmgeo::gromov
