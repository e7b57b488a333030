#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "mmgeo/graph.hpp"
#include "mmgeo/space.hpp"

namespace mmgeo::flow {

/// Relative entropy sum rho log rho dm for mu = rho m; +infinity when mu
/// charges a zero-mass point; 0 log 0 = 0.
double entropy(const Eigen::VectorXd& mu, const FinitePmmSpace& space);

struct EntropyDecomposition {
  double lhs;       // Ent_m(mu)
  double rhs;       // Ent_mtilde(mu) - C int d^2 dmu - log z
  double residual;  // |lhs - rhs|
};

/// Algebraic identity relating the entropy w.r.t. m and w.r.t. the Gaussian
/// tilt of m; the residual is a pure floating-point check.
EntropyDecomposition entropy_decomposition(const Eigen::VectorXd& mu,
                                           const FinitePmmSpace& space, double C);

/// Discrete Fisher information 8 E(sqrt(rho)) with rho = mu / node_mass.
/// Adopted as the definition of the squared descending slope on graphs.
double fisher(const Eigen::VectorXd& mu, const GraphDirichlet& graph);

/// Lower estimate of the descending slope at mu:
/// max over candidates nu of ((Ent(mu)-Ent(nu))/W2 + (K/2) W2)^+.
/// Nondecreasing in the candidate set; 0 when every quotient is <= 0.
double slope_sup(const Eigen::VectorXd& mu, const FinitePmmSpace& space, double K,
                 const std::vector<Eigen::VectorXd>& candidates);

struct JkoOptions {
  double kkt_tol = 1e-8;    // relative to 1 + max d^2/(2 tau)
  int max_stages = 60;
  int newton_iters = 200;
  int polish_sweeps = 2000;
};

struct JkoStepResult {
  Eigen::VectorXd mu_next;
  double kkt_residual = 0.0;  // relative
  int iterations = 0;
  bool snapped = false;  // input already optimal, returned unchanged
};

/// One minimizing-movement step: argmin over couplings gamma with first
/// marginal mu of  <gamma, d^2>/(2 tau) + Ent_m(second marginal).
/// Solved by entropic proximal iterations on the reduced dual with
/// epsilon scaling, then an exact per-row Gauss-Seidel polish; the reported
/// residual is the complementarity gap of the true program, relative to
/// 1 + max cost. Throws std::runtime_error if the target is not met.
JkoStepResult jko_step(const Eigen::VectorXd& mu, double tau, const FinitePmmSpace& space,
                       const JkoOptions& opt = {});

/// Time-stamped flow record. speeds/fishers/entropies are indexed per state;
/// step_w2[t] = W2(states[t], states[t+1]) recomputed exactly.
struct FlowTrace {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> step_w2;     // size states-1
  std::vector<double> entropies;   // size states
  std::vector<double> fishers;     // size states
  double tau = 0.0;
};

/// Iterated jko_step with per-step bookkeeping; asserts the entropy is
/// nonincreasing along the trace. T must be an integer multiple of tau.
FlowTrace jko_flow(const Eigen::VectorXd& mu0, double tau, double T,
                   const FinitePmmSpace& space, const GraphDirichlet& graph,
                   const JkoOptions& opt = {});

/// Per-interval energy-dissipation residuals
/// r_k = |Ent(mu_k) - Ent(mu_{k+1}) - tau/2 (speed_k^2 + fisher_k)|.
std::vector<double> ede_residual(const FlowTrace& trace, const GraphDirichlet& graph);

/// max over t of W2(mu_t, nu_t) - e^(-K t) W2(mu_0, nu_0); traces must share
/// their time grids.
double contraction_check(const FlowTrace& a, const FlowTrace& b,
                         const FinitePmmSpace& space, double K);

struct AprioriReport {
  bool pass = true;
  double speed_bound_slack = 0.0;           // rhs - lhs of the speed estimate
  double min_apriori_slack = std::numeric_limits<double>::infinity();
  std::vector<std::string> failures;
};

/// Two a priori estimates along a trace on [0, 1/(8C)]:
///   (i)  1/2 int_0^T |mu dot|^2 <= 2 Ent(mu0) + 4 C int d^2 dmu0 + 2 log z
///   (ii) I_K(t) Ent(mu_t) + I_K(t)^2/2 slope^2(mu_t)
///          <= I_K(t) Ent(nu) + 1/2 W2^2(nu, mu0)
/// with I_0(t) = t, slope estimated by slope_sup over {uniform, tilt, trace}
/// and nu ranging over {mu0, uniform, tilt}.
AprioriReport apriori_check(const FlowTrace& trace, const FinitePmmSpace& space, double C,
                            double K);

/// Recovery sequence by coupling-conditional-expectation transport: given a
/// coupling of the normalized masses of two spaces, pushes the density of
/// mu_from through the coupling kernel. Jensen gives
/// Ent_{to}(result) <= Ent_{from}(mu_from) up to the log total-mass shifts.
Eigen::VectorXd recovery_sequence(const Eigen::VectorXd& mu_from, const FinitePmmSpace& from,
                                  const FinitePmmSpace& to, const Eigen::MatrixXd& coupling);

}  // namespace mmgeo::flow
