#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>

// OpenMP kernel layer. Every kernel has a serial reference implementation
// (suffix _serial) that the parallel one must reproduce bit for bit; tests
// and the benchmark tool compare the two. Reductions are blocked with a
// fixed chunk size so results do not depend on the thread count.

namespace mmgeo::par {

// Effective thread budget: MMGEO_THREADS if set, else OpenMP default.
int threads();
void set_threads(int t);

struct TriangleViolation {
  double max_excess = 0.0;  // d(i,k) - d(i,j) - d(j,k), positive means violated
  int i = -1, j = -1, k = -1;
};

TriangleViolation max_triangle_violation_serial(const Eigen::MatrixXd& dist);
TriangleViolation max_triangle_violation(const Eigen::MatrixXd& dist);

// C[i][j] = f(D[i][j]) for a scalar map f.
Eigen::MatrixXd map_matrix_serial(const Eigen::MatrixXd& d,
                                  const std::function<double(double)>& f);
Eigen::MatrixXd map_matrix(const Eigen::MatrixXd& d,
                           const std::function<double(double)>& f);

// r[i] = log sum_j exp(a[i][j] + b[j]); the log-domain Sinkhorn row sweep.
Eigen::VectorXd logsumexp_rows_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd logsumexp_rows(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd logsumexp_cols_serial(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd logsumexp_cols(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// y_i = (1/m_i) sum_{j ~ i} w_ij (f_i - f_j) over an edge list given in CSR form.
struct EdgeCsr {
  std::vector<int> offsets;   // size n+1
  std::vector<int> neighbor;  // column index per entry
  std::vector<double> weight; // w_ij per entry (symmetric entries stored twice)
};
Eigen::VectorXd graph_apply_serial(const EdgeCsr& g, const Eigen::VectorXd& mass,
                                   const Eigen::VectorXd& f);
Eigen::VectorXd graph_apply(const EdgeCsr& g, const Eigen::VectorXd& mass,
                            const Eigen::VectorXd& f);

// Ball masses m(B_r(center)) for every center and radius on a shared grid.
// out(c, r) uses closed balls d <= radius.
Eigen::MatrixXd ball_mass_sweep_serial(const Eigen::MatrixXd& dist, const Eigen::VectorXd& mass,
                                       const std::vector<double>& radii);
Eigen::MatrixXd ball_mass_sweep(const Eigen::MatrixXd& dist, const Eigen::VectorXd& mass,
                                const std::vector<double>& radii);

// Deterministic blocked sum: identical result for any thread count.
double blocked_sum_serial(const double* x, std::size_t n);
double blocked_sum(const double* x, std::size_t n);

}  // namespace mmgeo::par
