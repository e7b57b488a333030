#include <chrono>
#include <cstdio>
#include <functional>

#include "mmgeo/lab.hpp"
#include "mmgeo/parallel.hpp"
#include "mmgeo/rng.hpp"

// Serial vs OpenMP kernel comparison. Results must agree bitwise; timings
// are wall clock over repeated runs.

using namespace mmgeo;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, int n, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-22s n=%-6d serial %9.3f ms   omp %9.3f ms   speedup %5.2fx   %s\n", name, n,
              serial_ms, parallel_ms, serial_ms / parallel_ms, equal ? "match" : "MISMATCH");
}

}  // namespace

int main() {
  par::set_threads(0);
  std::printf("threads: %d\n", par::threads());
  Rng rng(42);

  for (int n : {128, 256, 384}) {
    Eigen::MatrixXd pts(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 3; ++j) pts(i, j) = rng.uniform();
    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dist(i, j) = (pts.row(i) - pts.row(j)).norm();

    par::TriangleViolation a, b;
    const double ts = time_ms([&] { a = par::max_triangle_violation_serial(dist); }, 3);
    const double tp = time_ms([&] { b = par::max_triangle_violation(dist); }, 3);
    row("triangle check", n, ts, tp, a.max_excess == b.max_excess);

    auto sq = [](double d) { return d * d; };
    Eigen::MatrixXd ms, mp;
    const double cs = time_ms([&] { ms = par::map_matrix_serial(dist, sq); }, 10);
    const double cp = time_ms([&] { mp = par::map_matrix(dist, sq); }, 10);
    row("cost assembly", n, cs, cp, ms == mp);

    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g(i) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd ls, lp;
    const double ss = time_ms([&] { ls = par::logsumexp_rows_serial(-dist, g); }, 10);
    const double sp = time_ms([&] { lp = par::logsumexp_rows(-dist, g); }, 10);
    row("logsumexp rows", n, ss, sp, ls == lp);
  }

  for (int n : {4096, 16384}) {
    const auto bench = lab::gen_circle(n);
    const auto csr = bench.graph.csr();
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f(i) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd ys, yp;
    const double gs =
        time_ms([&] { ys = par::graph_apply_serial(csr, bench.graph.node_mass, f); }, 20);
    const double gp = time_ms([&] { yp = par::graph_apply(csr, bench.graph.node_mass, f); }, 20);
    row("laplacian apply", n, gs, gp, ys == yp);
  }

  {
    const int n = 1 << 22;
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    double a = 0, b = 0;
    const double bs = time_ms([&] { a = par::blocked_sum_serial(x.data(), x.size()); }, 10);
    const double bp = time_ms([&] { b = par::blocked_sum(x.data(), x.size()); }, 10);
    row("blocked sum", n, bs, bp, a == b);
  }
  return 0;
}
