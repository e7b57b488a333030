#include "mmgeo/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace mmgeo::par {

namespace {
int g_threads = 0;  // 0 = uninitialized

int env_threads() {
  if (const char* s = std::getenv("MMGEO_THREADS")) {
    int v = std::atoi(s);
    if (v > 0) return v;
  }
  return omp_get_max_threads();
}
}  // namespace

int threads() {
  if (g_threads == 0) g_threads = env_threads();
  return g_threads;
}

void set_threads(int t) { g_threads = t > 0 ? t : env_threads(); }

TriangleViolation max_triangle_violation_serial(const Eigen::MatrixXd& dist) {
  const int n = static_cast<int>(dist.rows());
  TriangleViolation best;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double ex = dist(i, k) - dist(i, j) - dist(j, k);
        if (ex > best.max_excess) {
          best.max_excess = ex;
          best.i = i;
          best.j = j;
          best.k = k;
        }
      }
  return best;
}

TriangleViolation max_triangle_violation(const Eigen::MatrixXd& dist) {
  const int n = static_cast<int>(dist.rows());
  if (n < 48 || threads() == 1) return max_triangle_violation_serial(dist);
  std::vector<TriangleViolation> per_i(n);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (int i = 0; i < n; ++i) {
    TriangleViolation best;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double ex = dist(i, k) - dist(i, j) - dist(j, k);
        if (ex > best.max_excess) {
          best.max_excess = ex;
          best.i = i;
          best.j = j;
          best.k = k;
        }
      }
    per_i[i] = best;
  }
  TriangleViolation best;
  for (const auto& c : per_i)
    if (c.max_excess > best.max_excess) best = c;
  return best;
}

Eigen::MatrixXd map_matrix_serial(const Eigen::MatrixXd& d,
                                  const std::function<double(double)>& f) {
  Eigen::MatrixXd out(d.rows(), d.cols());
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j) out(i, j) = f(d(i, j));
  return out;
}

Eigen::MatrixXd map_matrix(const Eigen::MatrixXd& d, const std::function<double(double)>& f) {
  const Eigen::Index rows = d.rows();
  if (rows * d.cols() < 4096 || threads() == 1) return map_matrix_serial(d, f);
  Eigen::MatrixXd out(d.rows(), d.cols());
#pragma omp parallel for schedule(static) num_threads(threads())
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j) out(i, j) = f(d(i, j));
  return out;
}

namespace {
double lse_row(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, Eigen::Index i) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < a.cols(); ++j) mx = std::max(mx, a(i, j) + b(j));
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) s += std::exp(a(i, j) + b(j) - mx);
  return mx + std::log(s);
}
double lse_col(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, Eigen::Index j) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i) mx = std::max(mx, a(i, j) + b(i));
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) s += std::exp(a(i, j) + b(i) - mx);
  return mx + std::log(s);
}
}  // namespace

Eigen::VectorXd logsumexp_rows_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd r(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) r(i) = lse_row(a, b, i);
  return r;
}

Eigen::VectorXd logsumexp_rows(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() * a.cols() < 4096 || threads() == 1) return logsumexp_rows_serial(a, b);
  Eigen::VectorXd r(a.rows());
#pragma omp parallel for schedule(static) num_threads(threads())
  for (Eigen::Index i = 0; i < a.rows(); ++i) r(i) = lse_row(a, b, i);
  return r;
}

Eigen::VectorXd logsumexp_cols_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd r(a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) r(j) = lse_col(a, b, j);
  return r;
}

Eigen::VectorXd logsumexp_cols(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() * a.cols() < 4096 || threads() == 1) return logsumexp_cols_serial(a, b);
  Eigen::VectorXd r(a.cols());
#pragma omp parallel for schedule(static) num_threads(threads())
  for (Eigen::Index j = 0; j < a.cols(); ++j) r(j) = lse_col(a, b, j);
  return r;
}

Eigen::VectorXd graph_apply_serial(const EdgeCsr& g, const Eigen::VectorXd& mass,
                                   const Eigen::VectorXd& f) {
  const int n = static_cast<int>(mass.size());
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int e = g.offsets[i]; e < g.offsets[i + 1]; ++e)
      acc += g.weight[e] * (f(i) - f(g.neighbor[e]));
    y(i) = acc / mass(i);
  }
  return y;
}

Eigen::VectorXd graph_apply(const EdgeCsr& g, const Eigen::VectorXd& mass,
                            const Eigen::VectorXd& f) {
  const int n = static_cast<int>(mass.size());
  if (g.neighbor.size() < 8192 || threads() == 1) return graph_apply_serial(g, mass, f);
  Eigen::VectorXd y(n);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int e = g.offsets[i]; e < g.offsets[i + 1]; ++e)
      acc += g.weight[e] * (f(i) - f(g.neighbor[e]));
    y(i) = acc / mass(i);
  }
  return y;
}

Eigen::MatrixXd ball_mass_sweep_serial(const Eigen::MatrixXd& dist, const Eigen::VectorXd& mass,
                                       const std::vector<double>& radii) {
  const int n = static_cast<int>(mass.size());
  const int nr = static_cast<int>(radii.size());
  Eigen::MatrixXd out(n, nr);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < nr; ++r) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        if (dist(c, j) <= radii[r]) acc += mass(j);
      out(c, r) = acc;
    }
  return out;
}

Eigen::MatrixXd ball_mass_sweep(const Eigen::MatrixXd& dist, const Eigen::VectorXd& mass,
                                const std::vector<double>& radii) {
  const int n = static_cast<int>(mass.size());
  const int nr = static_cast<int>(radii.size());
  if (n * nr < 2048 || threads() == 1) return ball_mass_sweep_serial(dist, mass, radii);
  Eigen::MatrixXd out(n, nr);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < nr; ++r) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        if (dist(c, j) <= radii[r]) acc += mass(j);
      out(c, r) = acc;
    }
  return out;
}

namespace {
constexpr std::size_t kChunk = 1024;  // fixed blocking => thread-count independent sums
}

double blocked_sum_serial(const double* x, std::size_t n) {
  const std::size_t nblocks = (n + kChunk - 1) / kChunk;
  double total = 0.0;
  for (std::size_t b = 0; b < nblocks; ++b) {
    double acc = 0.0;
    const std::size_t end = std::min(n, (b + 1) * kChunk);
    for (std::size_t i = b * kChunk; i < end; ++i) acc += x[i];
    total += acc;
  }
  return total;
}

double blocked_sum(const double* x, std::size_t n) {
  if (n < 4 * kChunk || threads() == 1) return blocked_sum_serial(x, n);
  const std::size_t nblocks = (n + kChunk - 1) / kChunk;
  std::vector<double> partial(nblocks);
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    double acc = 0.0;
    const std::size_t end = std::min(n, static_cast<std::size_t>(b + 1) * kChunk);
    for (std::size_t i = static_cast<std::size_t>(b) * kChunk; i < end; ++i) acc += x[i];
    partial[b] = acc;
  }
  double total = 0.0;
  for (double v : partial) total += v;  // ordered merge
  return total;
}

}  // namespace mmgeo::par
