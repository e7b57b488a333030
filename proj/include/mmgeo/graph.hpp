#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mmgeo/parallel.hpp"
#include "mmgeo/space.hpp"

namespace mmgeo {

/// Node masses plus symmetric edge weights; the discrete carrier of the
/// Dirichlet energy E(f) = 1/2 sum_edges w_ij (f_i - f_j)^2 (each unordered
/// edge counted once).
struct GraphDirichlet {
  Eigen::VectorXd node_mass;
  struct Edge {
    int i, j;
    double w;
  };
  std::vector<Edge> edges;
  std::string provenance;  // "eps-graph r=..." or "explicit"
  bool connected_on_support = true;

  int n() const { return static_cast<int>(node_mass.size()); }
  par::EdgeCsr csr() const;
};

/// Dirichlet energy E(f) = 1/2 sum_edges w (f_i - f_j)^2.
double dirichlet_energy(const GraphDirichlet& g, const Eigen::VectorXd& f);

/// Neighborhood graph: edges between distinct points with 0 < d <= eps and
/// weights w_ij = m_i m_j / (eps^2 Z_eps). Z_eps is calibrated so that
/// unit-slope functions along the metric have energy total_mass / 2, i.e.
/// sum_edges w d^2 = total mass; on refining grids of one-dimensional model
/// spaces E then recovers the continuum Dirichlet integral 1/2 int |f'|^2 dm.
GraphDirichlet eps_graph(const FinitePmmSpace& space, double eps);

}  // namespace mmgeo
