#include "mmgeo/weights.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace mmgeo {

namespace quad {

namespace {
double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, lm, flm);
  const double right = simpson(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(f, a, fa, b, fb, m, fm);
  const double tol = std::max(std::abs(whole), 1e-12) * rel_tol;
  return adaptive(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double tail_integral(const std::function<double(double)>& f, double a, double rel_tol) {
  // s = a + t/(1-t), ds = dt/(1-t)^2, t in [0, 1)
  auto g = [&](double t) {
    if (t >= 1.0) return 0.0;
    const double om = 1.0 - t;
    const double s = a + t / om;
    return f(s) / (om * om);
  };
  // the substituted integrand vanishes at t=1 for integrable tails; stop short of 1
  return adaptive_simpson(g, 0.0, 1.0 - 1e-12, rel_tol);
}

}  // namespace quad

WeightSpec WeightSpec::constant() {
  WeightSpec w;
  w.eval = [](double) { return 1.0; };
  w.provenance = "explicit-formula";
  w.decays = false;
  return w;
}

WeightSpec WeightSpec::gauss(double C) {
  if (C <= 0.0) throw std::invalid_argument("WeightSpec::gauss: C must be positive");
  WeightSpec w;
  w.eval = [C](double r) { return std::exp(-C * r * r); };
  w.provenance = "explicit-formula";
  w.decays = true;
  return w;
}

WeightSpec WeightSpec::cubic_tail() {
  return psi_from_growth([](double) { return 1.0; });
}

WeightSpec WeightSpec::parse(const std::string& name) {
  if (name == "const") return constant();
  if (name == "cubic-tail") return cubic_tail();
  if (name.rfind("gauss:", 0) == 0) return gauss(std::stod(name.substr(6)));
  if (name == "gauss") return gauss(1.0);
  throw std::invalid_argument("unknown psi spec: " + name);
}

WeightSpec psi_from_growth(const std::function<double(double)>& phi, double grid_max,
                           double rel_tol) {
  const double phi0 = phi(0.0);
  if (!(phi0 > 0.0)) throw std::invalid_argument("psi_from_growth: phi(0) must be positive");
  auto integrand = [phi](double s) {
    const double q = 1.0 + s * s * s;
    return 1.0 / (q * q * phi(s));
  };

  // geometric grid 0, h, 2h(ish)...: r_0 = 0 then grid_max * ratio^-(k)
  const int kPts = 96;
  auto grid = std::make_shared<std::vector<double>>();
  grid->push_back(0.0);
  const double r_min = 1.0 / 1024.0;
  for (int i = 0; i <= kPts; ++i)
    grid->push_back(r_min * std::pow(grid_max / r_min, static_cast<double>(i) / kPts));

  const double tail_at_max = quad::tail_integral(integrand, grid->back(), rel_tol);
  if (!std::isfinite(tail_at_max)) throw std::runtime_error("psi_from_growth: tail quadrature failed");

  auto values = std::make_shared<std::vector<double>>(grid->size());
  // cumulative from the far end: psi(r_k) = psi(r_{k+1}) + int_{r_k}^{r_{k+1}}
  values->back() = tail_at_max;
  for (int i = static_cast<int>(grid->size()) - 2; i >= 0; --i) {
    const double seg = quad::adaptive_simpson(integrand, (*grid)[i], (*grid)[i + 1], rel_tol);
    if (!std::isfinite(seg)) throw std::runtime_error("psi_from_growth: quadrature failed");
    (*values)[i] = (*values)[i + 1] + seg;
  }
  if (!((*values)[0] > 0.0)) throw std::runtime_error("psi_from_growth: psi(0) not positive");

  const double rmax = grid->back();
  auto tail_bound_integrand = [phi0](double s) {
    const double q = 1.0 + s * s * s;
    return 1.0 / (q * q * phi0);
  };
  WeightSpec w;
  w.provenance = "tabulated";
  w.decays = true;
  w.eval = [grid, values, rmax, tail_bound_integrand, rel_tol](double r) {
    if (r <= 0.0) return (*values)[0];
    if (r >= rmax) {
      // monotone upper bound with the constant phi(0); keeps psi positive
      double v = quad::tail_integral(tail_bound_integrand, r, rel_tol);
      return std::max(v, 1e-300);
    }
    auto it = std::upper_bound(grid->begin(), grid->end(), r);
    const std::size_t hi = static_cast<std::size_t>(it - grid->begin());
    const std::size_t lo = hi - 1;
    const double t = (r - (*grid)[lo]) / ((*grid)[hi] - (*grid)[lo]);
    return (1.0 - t) * (*values)[lo] + t * (*values)[hi];
  };
  return w;
}

}  // namespace mmgeo
