#include <cmath>
#include <stdexcept>

#include "mmgeo/lab.hpp"

namespace mmgeo::lab {

namespace {

// grid on [a, b] with Voronoi-cell Lebesgue weights scaled to total `mass`
void append_segment(std::vector<double>& xs, std::vector<double>& ws, double a, double b,
                    int points, double mass) {
  const double h = (b - a) / (points - 1);
  for (int i = 0; i < points; ++i) {
    xs.push_back(a + i * h);
    const double cell = (i == 0 || i == points - 1) ? 0.5 * h : h;
    ws.push_back(mass * cell / (b - a));
  }
}

FinitePmmSpace from_line(const std::vector<double>& xs, const std::vector<double>& ws, int base) {
  const int n = static_cast<int>(xs.size());
  FinitePmmSpace s;
  s.dist.resize(n, n);
  s.mass.resize(n);
  for (int i = 0; i < n; ++i) {
    s.mass(i) = ws[i];
    for (int j = 0; j < n; ++j) s.dist(i, j) = std::abs(xs[i] - xs[j]);
  }
  s.base = base;
  return s;
}

}  // namespace

FinitePmmSpace gen_interval_with_atom(int n) {
  if (n < 2) throw std::invalid_argument("gen_interval_with_atom: n must be >= 2");
  std::vector<double> xs, ws;
  append_segment(xs, ws, 0.0, 1.0, n + 1, 1.0 / n);
  // atom at the grid point nearest 1/2
  int atom = 0;
  double best = 1e300;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - 0.5) < best) {
      best = std::abs(xs[i] - 0.5);
      atom = static_cast<int>(i);
    }
  ws[atom] += 1.0 - 1.0 / n;
  return from_line(xs, ws, atom);
}

FinitePmmSpace gen_split_interval(int n) {
  if (n < 2) throw std::invalid_argument("gen_split_interval: n must be >= 2");
  const double pitch = 1.0 / (4.0 * n);
  std::vector<double> xs, ws;
  const double left_len = 1.0 - 1.0 / n;
  const double right_len = 1.0 / n;
  const int left_pts = std::max(2, static_cast<int>(std::lround(left_len / pitch)) + 1);
  const int right_pts = std::max(2, static_cast<int>(std::lround(right_len / pitch)) + 1);
  append_segment(xs, ws, 0.0, left_len, left_pts, left_len);
  append_segment(xs, ws, 2.0, 2.0 + right_len, right_pts, right_len);
  return from_line(xs, ws, 0);
}

FinitePmmSpace gen_unit_interval(int n) {
  if (n < 1) throw std::invalid_argument("gen_unit_interval: n must be >= 1");
  std::vector<double> xs, ws;
  append_segment(xs, ws, 0.0, 1.0, n + 1, 1.0);
  return from_line(xs, ws, 0);
}

CircleBenchmark gen_circle(int n, double total_mass, double circumference) {
  if (n < 3) throw std::invalid_argument("gen_circle: n must be >= 3");
  if (total_mass <= 0 || circumference <= 0)
    throw std::invalid_argument("gen_circle: positive mass and circumference required");
  const double h = circumference / n;
  CircleBenchmark out;
  out.space.dist.resize(n, n);
  out.space.mass = Eigen::VectorXd::Constant(n, total_mass / n);
  out.space.base = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double k = std::abs(i - j);
      const double steps = std::min(k, n - k);
      out.space.dist(i, j) = steps * h;
    }
  out.graph = eps_graph(out.space, 1.5 * h);  // nearest neighbors only
  return out;
}

}  // namespace mmgeo::lab
