#include "mmgeo/entropy_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmgeo/transport.hpp"

namespace mmgeo::flow {

double entropy(const Eigen::VectorXd& mu, const FinitePmmSpace& space) {
  double acc = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    if (mu(i) <= 0.0) continue;  // 0 log 0 = 0
    if (space.mass(i) <= 0.0) return std::numeric_limits<double>::infinity();
    const double rho = mu(i) / space.mass(i);
    acc += mu(i) * std::log(rho < 1e-300 ? 1e-300 : rho);
  }
  return acc;
}

EntropyDecomposition entropy_decomposition(const Eigen::VectorXd& mu,
                                           const FinitePmmSpace& space, double C) {
  if (C < 0.0) throw std::invalid_argument("entropy_decomposition: C must be >= 0");
  EntropyDecomposition out{};
  out.lhs = entropy(mu, space);
  // tilt weights e^{-C d^2}; C = 0 degenerates to plain normalization
  FinitePmmSpace tilted = space;
  double z = 0.0, d2 = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    const double d = space.dist(i, space.base);
    tilted.mass(i) = std::exp(-C * d * d) * space.mass(i);
    z += tilted.mass(i);
    d2 += d * d * mu(i);
  }
  tilted.mass /= z;
  out.rhs = entropy(mu, tilted) - C * d2 - std::log(z);
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

double fisher(const Eigen::VectorXd& mu, const GraphDirichlet& graph) {
  Eigen::VectorXd sq(graph.n());
  for (int i = 0; i < graph.n(); ++i) {
    if (graph.node_mass(i) <= 0.0) {
      if (mu(i) > 0.0) return std::numeric_limits<double>::infinity();
      sq(i) = 0.0;
    } else {
      sq(i) = std::sqrt(std::max(0.0, mu(i) / graph.node_mass(i)));
    }
  }
  return 8.0 * dirichlet_energy(graph, sq);
}

double slope_sup(const Eigen::VectorXd& mu, const FinitePmmSpace& space, double K,
                 const std::vector<Eigen::VectorXd>& candidates) {
  const double ent_mu = entropy(mu, space);
  if (!std::isfinite(ent_mu)) return std::numeric_limits<double>::infinity();
  double best = 0.0;
  for (const auto& nu : candidates) {
    const double w = transport::w2(space, mu, nu);
    if (w <= 1e-12) continue;
    const double q = (ent_mu - entropy(nu, space)) / w + 0.5 * K * w;
    best = std::max(best, q);
  }
  return best;
}

FlowTrace jko_flow(const Eigen::VectorXd& mu0, double tau, double T,
                   const FinitePmmSpace& space, const GraphDirichlet& graph,
                   const JkoOptions& opt) {
  if (tau <= 0.0) throw std::invalid_argument("jko_flow: tau must be positive");
  const double steps_real = T / tau;
  const int steps = static_cast<int>(std::lround(steps_real));
  if (std::abs(steps_real - steps) > 1e-9)
    throw std::invalid_argument("jko_flow: T must be an integer multiple of tau");

  FlowTrace trace;
  trace.tau = tau;
  trace.times.push_back(0.0);
  trace.states.push_back(mu0);
  trace.entropies.push_back(entropy(mu0, space));
  trace.fishers.push_back(fisher(mu0, graph));
  Eigen::VectorXd mu = mu0;
  for (int k = 1; k <= steps; ++k) {
    auto step = jko_step(mu, tau, space, opt);
    mu = step.mu_next;
    const double ent = entropy(mu, space);
    if (ent > trace.entropies.back() + 1e-9)
      throw std::runtime_error("jko_flow: entropy increased along the trace");
    trace.step_w2.push_back(transport::w2(space, trace.states.back(), mu));
    trace.times.push_back(k * tau);
    trace.states.push_back(mu);
    trace.entropies.push_back(ent);
    trace.fishers.push_back(fisher(mu, graph));
  }
  return trace;
}

std::vector<double> ede_residual(const FlowTrace& trace, const GraphDirichlet& graph) {
  (void)graph;  // fishers are cached on the trace with its own graph
  std::vector<double> res;
  for (std::size_t k = 0; k + 1 < trace.states.size(); ++k) {
    const double tau = trace.times[k + 1] - trace.times[k];
    const double speed = trace.step_w2[k] / tau;
    const double drop = trace.entropies[k] - trace.entropies[k + 1];
    res.push_back(std::abs(drop - 0.5 * tau * (speed * speed + trace.fishers[k])));
  }
  return res;
}

double contraction_check(const FlowTrace& a, const FlowTrace& b, const FinitePmmSpace& space,
                         double K) {
  if (a.times.size() != b.times.size())
    throw std::invalid_argument("contraction_check: time grids differ");
  for (std::size_t k = 0; k < a.times.size(); ++k)
    if (std::abs(a.times[k] - b.times[k]) > 1e-12)
      throw std::invalid_argument("contraction_check: time grids differ");
  const double w0 = transport::w2(space, a.states[0], b.states[0]);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.times.size(); ++k) {
    const double wt = transport::w2(space, a.states[k], b.states[k]);
    worst = std::max(worst, wt - std::exp(-K * a.times[k]) * w0);
  }
  return worst;
}

AprioriReport apriori_check(const FlowTrace& trace, const FinitePmmSpace& space, double C,
                            double K) {
  if (C <= 0.0) throw std::invalid_argument("apriori_check: C must be positive");
  const double T = 1.0 / (8.0 * C);
  if (trace.times.back() < T - 1e-12)
    throw std::invalid_argument("apriori_check: trace horizon shorter than 1/(8C)");

  AprioriReport rep;
  const auto& mu0 = trace.states[0];
  const auto tilt = exp_tilt(space, C);

  // speed estimate on [0, T]
  double lhs = 0.0;
  for (std::size_t k = 0; k + 1 < trace.states.size() && trace.times[k + 1] <= T + 1e-12; ++k) {
    const double tau = trace.times[k + 1] - trace.times[k];
    const double speed = trace.step_w2[k] / tau;
    lhs += 0.5 * speed * speed * tau;
  }
  double d2 = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    const double d = space.dist(i, space.base);
    d2 += d * d * mu0(i);
  }
  const double rhs = 2.0 * entropy(mu0, space) + 4.0 * C * d2 + 2.0 * std::log(tilt.z);
  rep.speed_bound_slack = rhs - lhs;
  if (lhs > rhs) {
    rep.pass = false;
    rep.failures.push_back("speed estimate violated");
  }

  // I_K(t) Ent(mu_t) + I_K^2/2 slope^2 <= I_K(t) Ent(nu) + W2^2(nu, mu0)/2
  auto I = [K](double t) { return K == 0.0 ? t : (std::exp(K * t) - 1.0) / K; };
  const Eigen::VectorXd uniform = space.mass / space.total_mass();
  std::vector<Eigen::VectorXd> competitors{mu0, uniform, tilt.space.mass};
  for (std::size_t k = 1; k < trace.states.size(); ++k) {
    const double t = trace.times[k];
    if (t > T + 1e-12) break;
    std::vector<Eigen::VectorXd> cands{uniform, tilt.space.mass};
    for (std::size_t j = 0; j < trace.states.size(); ++j)
      if (j != k) cands.push_back(trace.states[j]);
    const double slope = slope_sup(trace.states[k], space, K, cands);
    const double lhs_t = I(t) * trace.entropies[k] + 0.5 * I(t) * I(t) * slope * slope;
    for (const auto& nu : competitors) {
      const double w = transport::w2(space, nu, mu0);
      const double rhs_t = I(t) * entropy(nu, space) + 0.5 * w * w;
      const double slack = rhs_t - lhs_t;
      rep.min_apriori_slack = std::min(rep.min_apriori_slack, slack);
      if (slack < -1e-12) {
        rep.pass = false;
        rep.failures.push_back("a priori estimate violated at t = " + std::to_string(t));
      }
    }
  }
  return rep;
}

Eigen::VectorXd recovery_sequence(const Eigen::VectorXd& mu_from, const FinitePmmSpace& from,
                                  const FinitePmmSpace& to, const Eigen::MatrixXd& coupling) {
  if (coupling.rows() != from.n() || coupling.cols() != to.n())
    throw std::invalid_argument("recovery_sequence: coupling shape mismatch");
  const double Mf = from.total_mass();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(to.n());
  // density of mu_from w.r.t. the normalized mass, pushed through the kernel
  for (int i = 0; i < from.n(); ++i) {
    if (from.mass(i) <= 0.0) continue;
    const double rho = mu_from(i) / (from.mass(i) / Mf);
    for (int j = 0; j < to.n(); ++j) out(j) += coupling(i, j) * rho;
  }
  const double s = out.sum();
  if (s > 0) out /= s;
  return out;
}

}  // namespace mmgeo::flow
