#include "mmgeo/graph.hpp"

#include <deque>
#include <stdexcept>

namespace mmgeo {

par::EdgeCsr GraphDirichlet::csr() const {
  const int nn = n();
  par::EdgeCsr g;
  g.offsets.assign(nn + 1, 0);
  for (const auto& e : edges) {
    ++g.offsets[e.i + 1];
    ++g.offsets[e.j + 1];
  }
  for (int i = 0; i < nn; ++i) g.offsets[i + 1] += g.offsets[i];
  g.neighbor.resize(2 * edges.size());
  g.weight.resize(2 * edges.size());
  std::vector<int> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (const auto& e : edges) {
    g.neighbor[cursor[e.i]] = e.j;
    g.weight[cursor[e.i]++] = e.w;
    g.neighbor[cursor[e.j]] = e.i;
    g.weight[cursor[e.j]++] = e.w;
  }
  return g;
}

double dirichlet_energy(const GraphDirichlet& g, const Eigen::VectorXd& f) {
  double acc = 0.0;
  for (const auto& e : g.edges) {
    const double d = f(e.i) - f(e.j);
    acc += e.w * d * d;
  }
  return 0.5 * acc;
}

GraphDirichlet eps_graph(const FinitePmmSpace& space, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("eps_graph: eps must be positive");
  GraphDirichlet g;
  g.node_mass = space.mass;
  g.provenance = "eps-graph r=" + std::to_string(eps);

  // calibration: sum_edges w d^2 = total mass, so unit-slope functions carry
  // energy M/2 and refining 1-D grids recover the Dirichlet integral
  double z_raw = 0.0;
  for (int i = 0; i < space.n(); ++i)
    for (int j = i + 1; j < space.n(); ++j) {
      const double d = space.dist(i, j);
      if (d > 0.0 && d <= eps) z_raw += space.mass(i) * space.mass(j) * d * d;
    }
  const double M = space.total_mass();
  if (z_raw <= 0.0) {
    g.connected_on_support = space.support().size() <= 1;
    return g;  // no edges at this radius
  }
  const double z_eps = z_raw / (M * eps * eps);
  for (int i = 0; i < space.n(); ++i)
    for (int j = i + 1; j < space.n(); ++j) {
      const double d = space.dist(i, j);
      if (d > 0.0 && d <= eps)
        g.edges.push_back({i, j, space.mass(i) * space.mass(j) / (eps * eps * z_eps)});
    }

  // connectivity on the support (diagnostic only)
  const auto sup = space.support();
  if (!sup.empty()) {
    std::vector<char> seen(space.n(), 0);
    std::deque<int> queue{sup[0]};
    seen[sup[0]] = 1;
    const auto csr = g.csr();
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int e = csr.offsets[u]; e < csr.offsets[u + 1]; ++e) {
        const int v = csr.neighbor[e];
        if (!seen[v]) {
          seen[v] = 1;
          queue.push_back(v);
        }
      }
    }
    g.connected_on_support = true;
    for (int s : sup)
      if (!seen[s]) g.connected_on_support = false;
  }
  return g;
}

}  // namespace mmgeo
