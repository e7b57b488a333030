#include <cmath>
#include <stdexcept>

#include "mmgeo/parallel.hpp"
#include "mmgeo/transport.hpp"

namespace mmgeo::transport {

SinkhornResult sinkhorn(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                        const Eigen::MatrixXd& cost, double eps, int max_iter, double tol) {
  if (eps <= 0.0) throw std::invalid_argument("sinkhorn: eps must be positive");
  if (std::abs(mu.sum() - nu.sum()) > 1e-8)
    throw std::invalid_argument("sinkhorn: marginal totals differ");
  const Eigen::Index m = mu.size(), n = nu.size();

  // log-domain potentials; zero-mass entries pinned at -inf via log
  Eigen::VectorXd logmu(m), lognu(n);
  for (Eigen::Index i = 0; i < m; ++i) logmu(i) = mu(i) > 0 ? std::log(mu(i)) : -1e300;
  for (Eigen::Index j = 0; j < n; ++j) lognu(j) = nu(j) > 0 ? std::log(nu(j)) : -1e300;

  const Eigen::MatrixXd mk = -cost / eps;  // kernel exponents
  Eigen::VectorXd f = Eigen::VectorXd::Zero(m), g = Eigen::VectorXd::Zero(n);

  SinkhornResult out;
  auto marginal_gap = [&]() {
    // row sums in log domain vs logmu
    Eigen::VectorXd r = par::logsumexp_rows(mk, g);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (mu(i) > 0) worst = std::max(worst, std::abs(std::exp(f(i) + r(i)) - mu(i)));
    return worst;
  };

  int it = 0;
  for (; it < max_iter; ++it) {
    // f update exact: f_i = log mu_i - lse_j(mk_ij + g_j)
    const Eigen::VectorXd lr = par::logsumexp_rows(mk, g);
    for (Eigen::Index i = 0; i < m; ++i) f(i) = logmu(i) - lr(i);
    const Eigen::VectorXd lc = par::logsumexp_cols(mk, f);
    Eigen::VectorXd gn(n);
    for (Eigen::Index j = 0; j < n; ++j) gn(j) = lognu(j) - lc(j);
    const double delta = (gn - g).cwiseAbs().maxCoeff();
    g = gn;
    if (delta < tol) {
      ++it;
      break;
    }
  }
  out.report.iterations = it;
  out.report.marginal_error = marginal_gap();
  out.report.converged = out.report.marginal_error < 1e-6;

  // recover plan and round to exact marginals (scale rows/cols below target,
  // then add a rank-one correction)
  Eigen::MatrixXd plan(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) plan(i, j) = std::exp(f(i) + mk(i, j) + g(j));

  Eigen::VectorXd rs = plan.rowwise().sum();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = rs(i) > 0 ? std::min(1.0, mu(i) / rs(i)) : 0.0;
    plan.row(i) *= s;
  }
  Eigen::VectorXd cs = plan.colwise().sum();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = cs(j) > 0 ? std::min(1.0, nu(j) / cs(j)) : 0.0;
    plan.col(j) *= s;
  }
  Eigen::VectorXd er = mu - plan.rowwise().sum().cwiseMax(0.0).eval();
  Eigen::VectorXd ec = nu - plan.colwise().sum().transpose().cwiseMax(0.0).eval();
  er = er.cwiseMax(0.0);
  ec = ec.cwiseMax(0.0);
  const double era = er.sum();
  if (era > 0) plan += er * ec.transpose() / era;

  out.coupling.plan = plan;
  out.coupling.mu = mu;
  out.coupling.nu = nu;
  out.value = (plan.array() * cost.array()).sum();
  return out;
}

}  // namespace mmgeo::transport
