#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmgeo/rng.hpp"
#include "mmgeo/spectral.hpp"
#include "mmgeo/transport.hpp"

namespace mmgeo::spectral {

namespace {

// Lipschitz test family on the limit space: tent functions around a few
// well-spread centers at two scales
std::vector<Eigen::VectorXd> test_family(const FinitePmmSpace& limit) {
  std::vector<Eigen::VectorXd> fam;
  const double R = std::max(limit.radius_from_base(), 1e-9);
  std::vector<int> centers;
  centers.push_back(limit.base);
  for (int c = 0; c < limit.n() && centers.size() < 5; c += std::max(1, limit.n() / 5))
    if (c != limit.base) centers.push_back(c);
  for (int c : centers)
    for (double s : {R, 0.5 * R}) {
      Eigen::VectorXd phi(limit.n());
      for (int i = 0; i < limit.n(); ++i)
        phi(i) = std::max(0.0, 1.0 - limit.dist(i, c) / s);
      fam.push_back(phi);
    }
  return fam;
}

}  // namespace

MoscoReport mosco_diagnostic(const std::vector<MoscoElement>& ladder,
                             const FinitePmmSpace& limit_space,
                             const GraphDirichlet& limit_graph, const Eigen::VectorXd& f_inf,
                             double tol, std::uint64_t seed) {
  MoscoReport report;
  const double e_inf = dirichlet_energy(limit_graph, f_inf);
  const double M_inf = limit_space.total_mass();
  double n2_inf = 0.0;
  for (int i = 0; i < limit_space.n(); ++i)
    n2_inf += f_inf(i) * f_inf(i) * limit_space.mass(i);
  const auto tests = test_family(limit_space);
  Rng rng(seed);

  int index = 0;
  for (const auto& el : ladder) {
    if (el.cross_to_limit.rows() != el.space.n() || el.cross_to_limit.cols() != limit_space.n())
      throw std::invalid_argument("mosco_diagnostic: cross matrix shape mismatch");
    MoscoRow row;
    row.index = index++;
    row.energy_limit = e_inf;

    // recovery by coupling-conditional expectation through the W2-optimal
    // coupling of the normalized masses on the joined metric
    const double M_n = el.space.total_mass();
    Eigen::VectorXd mhat_n = el.space.mass / M_n;
    Eigen::VectorXd mhat_inf = limit_space.mass / M_inf;
    const Eigen::MatrixXd cost = el.cross_to_limit.array().square();
    const Eigen::MatrixXd plan =
        transport::optimal_coupling(mhat_n, mhat_inf, cost).coupling.plan;

    Eigen::VectorXd f_n = Eigen::VectorXd::Zero(el.space.n());
    for (int i = 0; i < el.space.n(); ++i) {
      if (mhat_n(i) <= 0.0) continue;
      double acc = 0.0;
      for (int j = 0; j < limit_space.n(); ++j) acc += plan(i, j) * f_inf(j);
      f_n(i) = acc / mhat_n(i);  // conditional expectation of f_inf given i
    }

    row.energy_n = dirichlet_energy(el.graph, f_n);
    row.energy_gap = std::abs(row.energy_n - e_inf);
    double n2 = 0.0;
    for (int i = 0; i < el.space.n(); ++i) n2 += f_n(i) * f_n(i) * el.space.mass(i);
    row.l2_norm_gap = std::abs(n2 - n2_inf);
    double tg = 0.0;
    for (const auto& phi : tests) {
      // pair the test function with f_n through the cross metric: evaluate
      // phi at the nearest limit point of each ladder point
      double int_n = 0.0;
      for (int i = 0; i < el.space.n(); ++i) {
        int arg = 0;
        el.cross_to_limit.row(i).minCoeff(&arg);
        int_n += phi(arg) * f_n(i) * el.space.mass(i);
      }
      double int_inf = 0.0;
      for (int j = 0; j < limit_space.n(); ++j)
        int_inf += phi(j) * f_inf(j) * limit_space.mass(j);
      tg = std::max(tg, std::abs(int_n - int_inf));
    }
    row.test_integral_gap = tg;

    // liminf probe: small spiked / drifted / noisy perturbations of the
    // recovery that stay weakly close to f_inf. This samples a family, it
    // does not quantify over all weakly converging sequences; the flag
    // budget absorbs the O(delta) energy shift of the perturbations.
    const double delta = 1e-3;
    double margin = std::numeric_limits<double>::infinity();
    LaplaceOperator op(el.graph);
    const Eigen::VectorXd drift = op.apply(f_n);  // transported wiggle direction
    const double drift_scale = std::max(1.0, drift.cwiseAbs().maxCoeff());
    for (int t = 0; t < 9; ++t) {
      Eigen::VectorXd g = f_n;
      switch (t % 3) {
        case 0: {  // spike
          const int at = static_cast<int>(rng.below(el.space.n()));
          g(at) += delta * (2.0 * rng.uniform() - 1.0);
          break;
        }
        case 1:  // drift along the graph flow direction, normalized
          g -= (delta / drift_scale) * drift;
          break;
        default:  // noise
          for (int i = 0; i < el.space.n(); ++i) g(i) += delta * rng.normal();
          break;
      }
      margin = std::min(margin, dirichlet_energy(el.graph, g) - e_inf);
    }
    row.liminf_margin = margin;
    row.liminf_flag =
        margin < -(tol + 10.0 * delta * (1.0 + std::abs(e_inf)) * std::sqrt(1.0 + e_inf));
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace mmgeo::spectral
