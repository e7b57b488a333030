#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "mmgeo/space.hpp"

namespace mmgeo::transport {

/// A transport plan with its prescribed marginals.
struct Coupling {
  Eigen::MatrixXd plan;  // n1 x n2, nonnegative
  Eigen::VectorXd mu;    // row marginals
  Eigen::VectorXd nu;    // column marginals

  double max_marginal_error() const;
};

/// Transport cost specification. The concave kind wraps a scalar
/// c with c(0) = 0, nondecreasing, bounded and concave; cost(x,y) = c(d(x,y)).
struct CostSpec {
  enum class Kind { Quadratic, Concave };
  Kind kind = Kind::Concave;
  std::function<double(double)> c;   // concave kind only
  double sup = 1.0;                  // sup of c

  static CostSpec quadratic();
  static CostSpec min1();                 // c(d) = min(d, 1)
  static CostSpec tanh_cost();            // c(d) = tanh(d)
  static CostSpec parse(const std::string& name);  // min1 | tanh

  /// Midpoint concavity, monotonicity and c(0)=0 on a sample grid.
  bool valid_on_grid(double r_max = 8.0, int samples = 257) const;
  double apply(double d) const;
};

struct OtResult {
  Coupling coupling;
  double value = 0.0;
  int iterations = 0;
};

/// Exact linear OT by the transportation simplex. Marginals must agree in
/// total to 1e-8; zero-mass rows and columns are dropped before solving and
/// reinserted as zero rows. Value is within 1e-9 (absolute, for unit-scale
/// inputs) of the LP optimum.
OtResult optimal_coupling(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                          const Eigen::MatrixXd& cost);

/// W2 on the metric of `space` between two probability vectors on its points.
double w2(const FinitePmmSpace& space, const Eigen::VectorXd& mu, const Eigen::VectorXd& nu);

/// Bounded-cost transport distance W_c with a concave cost spec.
double wc(const FinitePmmSpace& space, const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
          const CostSpec& cost);

/// Generic optimal value for an explicit cost matrix (exact solver).
double ot_value(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                const Eigen::MatrixXd& cost);

struct SinkhornReport {
  bool converged = false;
  int iterations = 0;
  double marginal_error = 0.0;  // before rounding
};

struct SinkhornResult {
  double value = 0.0;  // <plan, cost> of the rounded feasible plan
  Coupling coupling;
  SinkhornReport report;
};

/// Log-domain Sinkhorn with a final rounding pass that restores exact
/// marginals. The value is an approximation: within O(eps log n) of the
/// optimum, not certified.
SinkhornResult sinkhorn(const Eigen::VectorXd& mu, const Eigen::VectorXd& nu,
                        const Eigen::MatrixXd& cost, double eps, int max_iter = 10000,
                        double tol = 1e-9);

/// sum over d(., base) > R of d^2(., base) mu.
double tail_second_moment(const FinitePmmSpace& space, const Eigen::VectorXd& mu, double R);

}  // namespace mmgeo::transport
