#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmgeo/entropy_flow.hpp"
#include "mmgeo/transport.hpp"

// Minimizing-movement step in the coupling variable:
//   min over gamma >= 0 with row sums mu of  <gamma, ct> + H(colsum gamma),
// ct = d^2 / (2 tau), H(nu) = sum nu log(nu / m). The entropy keeps every
// column positive, so the dual
//   D(h) = sum_i mu_i softmin_eps_j(ct_ij + h_j) - sum_j m_j e^{h_j - 1}
// is smooth and strictly concave for eps > 0. Strategy: epsilon scaling with
// a damped Newton ascent per stage (block Sinkhorn update as fallback), then
// an exact per-row Gauss-Seidel polish on the primal. The reported residual
// is the complementarity gap of the unsmoothed program, relative to
// 1 + max ct.

namespace mmgeo::flow {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct DualState {
  const MatrixXd& ct;
  const VectorXd& mu;
  const VectorXd& logmu;   // log mu, -inf rows excluded by mask
  const VectorXd& logm;    // log node masses
  double eps;

  // row-normalized plan P (rows with mu_i = 0 are zero), given h
  MatrixXd plan(const VectorXd& h) const {
    const Eigen::Index m = ct.rows(), n = ct.cols();
    MatrixXd P = MatrixXd::Zero(m, n);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (mu(i) <= 0.0) continue;
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) mx = std::max(mx, -(ct(i, j) + h(j)));
      double s = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        P(i, j) = std::exp((-(ct(i, j) + h(j)) - mx) / eps);
        s += P(i, j);
      }
      P.row(i) /= s;
    }
    return P;
  }

  double value(const VectorXd& h) const {
    const Eigen::Index m = ct.rows(), n = ct.cols();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (mu(i) <= 0.0) continue;
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j) mx = std::max(mx, -(ct(i, j) + h(j)));
      double s = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) s += std::exp((-(ct(i, j) + h(j)) - mx) / eps);
      // softmin_j(ct + h) = -eps * lse(-(ct+h)/eps)
      acc += mu(i) * (-(mx + eps * std::log(s)));
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      const double hj = std::min(h(j), 700.0);
      acc -= std::exp(logm(j) + hj - 1.0);
    }
    return acc;
  }
};

double kkt_gap(const MatrixXd& ct, const VectorXd& mu, const VectorXd& logm, const MatrixXd& P,
               const VectorXd& nu) {
  const Eigen::Index m = ct.rows(), n = ct.cols();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (mu(i) <= 0.0) continue;
    double smin = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      const double nuj = std::max(nu(j), 1e-300);
      smin = std::min(smin, ct(i, j) + 1.0 + std::log(nuj) - logm(j));
    }
    double gap = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (P(i, j) <= 0.0) continue;
      const double nuj = std::max(nu(j), 1e-300);
      gap += P(i, j) * (ct(i, j) + 1.0 + std::log(nuj) - logm(j) - smin);
    }
    worst = std::max(worst, gap);
  }
  return worst;
}

// exact row subproblem: min over p >= 0, sum p = mu_i of
// sum_j p_j ct_ij + sum_j (nu_o + p)_j log((nu_o + p)_j / m_j);
// stationarity p_j = max(0, m_j e^{lam - 1 - ct_ij} - nu_o_j), lam solved by
// bracketing + bisection on the monotone mass equation
VectorXd row_solve(double mu_i, const VectorXd& cti, const VectorXd& nu_other,
                   const VectorXd& logm) {
  const Eigen::Index n = cti.size();
  VectorXd p(n);
  auto mass_at = [&](double lam) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double e = logm(j) + lam - 1.0 - cti(j);
      const double t = (e > -745.0 ? std::exp(std::min(e, 700.0)) : 0.0) - nu_other(j);
      if (t > 0.0) s += t;
    }
    return s;
  };
  double lo = -60.0, hi = 60.0;
  while (mass_at(lo) > mu_i) lo -= 60.0;
  while (mass_at(hi) < mu_i) hi += 60.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass_at(mid) > mu_i)
      hi = mid;
    else
      lo = mid;
    if (hi - lo < 1e-15 * std::max(1.0, std::abs(mid))) break;
  }
  const double lam = 0.5 * (lo + hi);
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double e = logm(j) + lam - 1.0 - cti(j);
    const double t = (e > -745.0 ? std::exp(std::min(e, 700.0)) : 0.0) - nu_other(j);
    p(j) = t > 0.0 ? t : 0.0;
    s += p(j);
  }
  if (s > 0.0) p *= mu_i / s;
  return p;
}

}  // namespace

JkoStepResult jko_step(const Eigen::VectorXd& mu, double tau, const FinitePmmSpace& space,
                       const JkoOptions& opt) {
  if (tau <= 0.0) throw std::invalid_argument("jko_step: tau must be positive");
  const int n = space.n();
  if (mu.size() != n) throw std::invalid_argument("jko_step: size mismatch");
  if (std::abs(mu.sum() - 1.0) > 1e-8)
    throw std::invalid_argument("jko_step: mu must be a probability vector");
  if (!std::isfinite(entropy(mu, space)))
    throw std::invalid_argument("jko_step: Ent(mu) must be finite");

  const MatrixXd ct = space.dist.array().square() / (2.0 * tau);
  const double scale = 1.0 + ct.maxCoeff();
  const double tol_abs = opt.kkt_tol * scale;

  VectorXd logm(n), logmu(n);
  for (int i = 0; i < n; ++i) {
    logm(i) = space.mass(i) > 0 ? std::log(space.mass(i)) : -1e300;
    logmu(i) = mu(i) > 0 ? std::log(mu(i)) : -1e300;
  }

  JkoStepResult out;

  // snap: when mu itself satisfies the optimality conditions the step is a
  // fixed point; returning it unchanged keeps frozen flows bitwise stable
  {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mu(i) <= 0.0) continue;
      double smin = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j)
        if (mu(j) > 0.0 || space.mass(j) > 0.0)
          smin = std::min(smin, ct(i, j) + 1.0 + logmu(j) - logm(j));
      worst = std::max(worst, ct(i, i) + 1.0 + logmu(i) - logm(i) - smin);
    }
    if (worst <= tol_abs) {
      out.mu_next = mu;
      out.kkt_residual = worst / scale;
      out.snapped = true;
      return out;
    }
  }

  // epsilon scaling on the reduced dual
  DualState dual{ct, mu, logmu, logm, std::max(tau / 10.0, 0.25 * ct.maxCoeff())};
  VectorXd h(n);
  for (int j = 0; j < n; ++j) h(j) = 1.0 + std::clamp(logmu(j) - logm(j), -60.0, 60.0);

  double best_comp = std::numeric_limits<double>::infinity();
  MatrixXd best_plan;
  int iters = 0;

  for (int stage = 0; stage < opt.max_stages; ++stage) {
    double g0 = dual.value(h);
    for (int it = 0; it < opt.newton_iters; ++it) {
      ++iters;
      const MatrixXd P = dual.plan(h);
      VectorXd q = VectorXd::Zero(n);
      for (int i = 0; i < n; ++i)
        if (mu(i) > 0.0) q += mu(i) * P.row(i).transpose();
      VectorXd nu_h(n);
      for (int j = 0; j < n; ++j) nu_h(j) = std::exp(logm(j) + std::min(h(j), 700.0) - 1.0);
      const VectorXd grad = q - nu_h;
      if (grad.cwiseAbs().maxCoeff() < 1e-14) break;

      MatrixXd H = MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        if (mu(i) <= 0.0) continue;
        H += (mu(i) / dual.eps) * P.row(i).transpose() * P.row(i);
      }
      for (int j = 0; j < n; ++j) H(j, j) += -(q(j) / dual.eps) - nu_h(j);
      VectorXd dh = H.ldlt().solve(-grad);
      if (!dh.allFinite()) dh = grad.cwiseQuotient(nu_h.cwiseMax(1e-300));

      double step = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        const VectorXd h2 = h + step * dh;
        const double g2 = dual.value(h2);
        if (std::isfinite(g2) && g2 > g0 + 1e-18 * std::abs(g0)) {
          h = h2;
          g0 = g2;
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        // guaranteed-ascent block update (one proximal Sinkhorn pass):
        // phi_i = eps (log mu_i - lse_l(-(ct_il + h_l)/eps)),
        // h_j   = eps/(1+eps) (1 + lse_i((phi_i - ct_ij)/eps) - log m_j)
        VectorXd phi(n);
        for (int i = 0; i < n; ++i) {
          if (mu(i) <= 0.0) {
            phi(i) = -std::numeric_limits<double>::infinity();
            continue;
          }
          double rmx = -std::numeric_limits<double>::infinity();
          for (int l = 0; l < n; ++l) rmx = std::max(rmx, -(ct(i, l) + h(l)));
          double rs = 0.0;
          for (int l = 0; l < n; ++l) rs += std::exp((-(ct(i, l) + h(l)) - rmx) / dual.eps);
          phi(i) = dual.eps * logmu(i) - (rmx + dual.eps * std::log(rs));
        }
        VectorXd h2(n);
        for (int j = 0; j < n; ++j) {
          double mx = -std::numeric_limits<double>::infinity();
          for (int i = 0; i < n; ++i)
            if (mu(i) > 0.0) mx = std::max(mx, (phi(i) - ct(i, j)) / dual.eps);
          double s = 0.0;
          for (int i = 0; i < n; ++i)
            if (mu(i) > 0.0) s += std::exp((phi(i) - ct(i, j)) / dual.eps - mx);
          const double logS = mx + std::log(s);
          h2(j) = (dual.eps / (1.0 + dual.eps)) * (1.0 + logS - logm(j));
        }
        const double g2 = dual.value(h2);
        if (!(g2 > g0 + 1e-18 * std::abs(g0))) break;  // stage converged to fp precision
        h = h2;
        g0 = g2;
      }
    }
    const MatrixXd P = dual.plan(h);
    VectorXd nu = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      if (mu(i) > 0.0) nu += mu(i) * P.row(i).transpose();
    const double comp = kkt_gap(ct, mu, logm, P, nu);
    if (comp <= tol_abs) {
      out.mu_next = nu;
      out.kkt_residual = comp / scale;
      out.iterations = iters;
      return out;
    }
    if (comp < best_comp) {
      best_comp = comp;
      best_plan = mu.asDiagonal() * P;
    }
    // stop scaling at the floating-point wall and fall through to the polish
    if (comp > 4.0 * best_comp || dual.eps < 1e-9 * scale) break;
    dual.eps /= 5.0;
  }

  // exact Gauss-Seidel polish, alternating sweep direction
  MatrixXd G = best_plan.size() > 0 ? best_plan : MatrixXd(mu.asDiagonal());
  VectorXd nu = G.colwise().sum().transpose();
  double comp = best_comp;
  for (int sweep = 0; sweep < opt.polish_sweeps; ++sweep) {
    for (int s = 0; s < n; ++s) {
      const int i = (sweep % 2 == 0) ? s : n - 1 - s;
      if (mu(i) <= 0.0) continue;
      const VectorXd nu_other = nu - G.row(i).transpose();
      const VectorXd p = row_solve(mu(i), ct.row(i).transpose(), nu_other, logm);
      nu = nu_other + p;
      G.row(i) = p.transpose();
      ++iters;
    }
    const MatrixXd P = [&] {
      MatrixXd out2 = G;
      for (int i = 0; i < n; ++i)
        if (mu(i) > 0.0) out2.row(i) /= mu(i);
      return out2;
    }();
    comp = kkt_gap(ct, mu, logm, P, nu);
    if (comp <= std::min(tol_abs, std::max(0.1 * tol_abs, 5e-11 * scale))) break;
  }
  if (comp > tol_abs)
    throw std::runtime_error("jko_step: solver did not reach the KKT tolerance, residual " +
                             std::to_string(comp / scale));
  out.mu_next = nu;
  out.kkt_residual = comp / scale;
  out.iterations = iters;
  return out;
}

}  // namespace mmgeo::flow
