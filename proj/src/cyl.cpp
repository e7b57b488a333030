#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "mmgeo/gromov.hpp"

namespace mmgeo::gromov {

namespace {

// canonical form: coordinates 2..N sorted by (base distance, full row), so
// that relabelings of the underlying space produce identical atoms
Eigen::MatrixXd canonicalize_atom(Eigen::MatrixXd g) {
  const int N = static_cast<int>(g.rows());
  std::vector<int> ord(N);
  for (int i = 0; i < N; ++i) ord[i] = i;
  std::stable_sort(ord.begin() + 1, ord.end(), [&](int x, int y) {
    if (g(0, x) != g(0, y)) return g(0, x) < g(0, y);
    for (int k = 0; k < N; ++k)
      if (g(x, k) != g(y, k)) return g(x, k) < g(y, k);
    return false;
  });
  Eigen::MatrixXd out(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) out(i, j) = g(ord[i], ord[j]);
  return out;
}

struct AtomLess {
  bool operator()(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const {
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (x(i, j) < y(i, j)) return true;
        if (x(i, j) > y(i, j)) return false;
      }
    return false;
  }
};

}  // namespace

double CylMeasure::total_weight() const {
  double t = 0.0;
  for (double w : weights) t += w;
  return t;
}

CylMeasure cyl_pushforward(const FinitePmmSpace& space_in, int order, const CylOptions& opt) {
  if (order < 2) throw std::invalid_argument("cyl_pushforward: order must be >= 2");
  if (order > opt.max_order)
    throw std::invalid_argument("cyl_pushforward: order exceeds cap " +
                                std::to_string(opt.max_order));
  const FinitePmmSpace space = support_restrict(space_in);
  const int n = space.n();
  double count = 1.0;
  for (int k = 1; k < order; ++k) count *= n;
  if (count > static_cast<double>(opt.max_atoms))
    throw std::invalid_argument("cyl_pushforward: atom count exceeds cap");

  CylMeasure out;
  out.order = order;
  std::map<Eigen::MatrixXd, double, AtomLess> merged;

  std::vector<int> tuple(order, 0);
  tuple[0] = space.base;
  const int free = order - 1;
  std::vector<int> idx(free, 0);
  while (true) {
    for (int k = 0; k < free; ++k) tuple[k + 1] = idx[k];
    double w = 1.0;
    for (int k = 1; k < order; ++k) w *= space.mass(tuple[k]);
    Eigen::MatrixXd g(order, order);
    for (int p = 0; p < order; ++p)
      for (int q = 0; q < order; ++q) g(p, q) = space.dist(tuple[p], tuple[q]);
    merged[canonicalize_atom(std::move(g))] += w;

    int k = free - 1;
    while (k >= 0 && ++idx[k] == n) idx[k--] = 0;
    if (k < 0) break;
  }

  out.atoms.reserve(merged.size());
  out.weights.reserve(merged.size());
  for (auto& [g, w] : merged) {
    out.atoms.push_back(g);
    out.weights.push_back(w);
  }
  return out;
}

bool cyl_equal(const CylMeasure& x, const CylMeasure& y, double tol) {
  if (x.order != y.order || x.atoms.size() != y.atoms.size()) return false;
  for (std::size_t k = 0; k < x.atoms.size(); ++k) {
    if (std::abs(x.weights[k] - y.weights[k]) > tol) return false;
    if (((x.atoms[k] - y.atoms[k]).cwiseAbs().maxCoeff()) > tol) return false;
  }
  return true;
}

double cyl_discrepancy(const FinitePmmSpace& a, const FinitePmmSpace& b, int order,
                       const transport::CostSpec& cost, const CylOptions& opt) {
  const CylMeasure ca = cyl_pushforward(a, order, opt);
  const CylMeasure cb = cyl_pushforward(b, order, opt);
  const double ta = ca.total_weight(), tb = cb.total_weight();
  if (ta <= 0.0 || tb <= 0.0) throw std::invalid_argument("cyl_discrepancy: empty measure");

  Eigen::VectorXd mu(ca.atoms.size()), nu(cb.atoms.size());
  for (std::size_t i = 0; i < ca.atoms.size(); ++i) mu(i) = ca.weights[i] / ta;
  for (std::size_t j = 0; j < cb.atoms.size(); ++j) nu(j) = cb.weights[j] / tb;
  Eigen::MatrixXd cm(ca.atoms.size(), cb.atoms.size());
  for (std::size_t i = 0; i < ca.atoms.size(); ++i)
    for (std::size_t j = 0; j < cb.atoms.size(); ++j) {
      const double d = (ca.atoms[i] - cb.atoms[j]).cwiseAbs().maxCoeff();
      cm(i, j) = cost.apply(d);
    }
  return std::abs(std::log(ta / tb)) + transport::ot_value(mu, nu, cm);
}

ReconstructionResult reconstruction_test(const FinitePmmSpace& a, const FinitePmmSpace& b,
                                         int max_order, const IsoOptions& iso_opt) {
  ReconstructionResult res;
  CylOptions copt;
  copt.max_order = std::max(max_order, copt.max_order);
  for (int N = 2; N <= max_order; ++N) {
    const auto ca = cyl_pushforward(a, N, copt);
    const auto cb = cyl_pushforward(b, N, copt);
    if (!cyl_equal(ca, cb, 0.0)) {
      res.cyl_equal_up_to_order = false;
      res.first_differing_order = N;
      break;
    }
  }
  res.iso = is_isomorphic(a, b, iso_opt);
  return res;
}

}  // namespace mmgeo::gromov
