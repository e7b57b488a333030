#pragma once

#include <functional>
#include <string>

namespace mmgeo {

/// A positive nonincreasing weight psi applied to base distances.
/// Decay to zero at infinity is diagnosed on a sample grid rather than
/// enforced, so the constant weight of the normalized theory stays usable.
struct WeightSpec {
  std::function<double(double)> eval;
  std::string provenance;  // "explicit-formula" or "tabulated"
  bool decays = true;      // psi(r) -> 0 plausible on the sampled grid

  double operator()(double r) const { return eval(r); }

  static WeightSpec constant();          // psi == 1 (no decay)
  static WeightSpec gauss(double C);     // psi(r) = exp(-C r^2)
  static WeightSpec cubic_tail();        // psi from growth phi == 1
  static WeightSpec parse(const std::string& name);  // const | cubic-tail | gauss:C
};

/// Builds psi(r) = integral_r^inf ds / ((1+s^3)^2 phi(s)) for a continuous
/// nondecreasing phi with phi(0) > 0. The integral is tabulated on a
/// geometric grid and linearly interpolated; past the last grid point the
/// bound psi(r) <= integral_r^inf ds/((1+s^3)^2 phi(0)) is used.
/// Throws std::runtime_error when the tail quadrature fails to converge.
WeightSpec psi_from_growth(const std::function<double(double)>& phi,
                           double grid_max = 64.0, double rel_tol = 1e-10);

namespace quad {
/// Adaptive Simpson on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth = 60);
/// Integral over [a, inf) via the substitution s = a + t/(1-t).
double tail_integral(const std::function<double(double)>& f, double a, double rel_tol);
}  // namespace quad

}  // namespace mmgeo
