#include "mmgeo/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mmgeo/rng.hpp"

namespace mmgeo::spectral {

LaplaceOperator::LaplaceOperator(GraphDirichlet graph) : graph_(std::move(graph)) {
  if (graph_.node_mass.minCoeff() <= 0.0)
    throw std::invalid_argument("LaplaceOperator: node masses must be positive");
  csr_ = graph_.csr();
}

Eigen::VectorXd LaplaceOperator::apply(const Eigen::VectorXd& f) const {
  return par::graph_apply(csr_, graph_.node_mass, f);
}

double LaplaceOperator::inner_m(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const {
  return (f.array() * g.array() * graph_.node_mass.array()).sum();
}

double LaplaceOperator::norm_m(const Eigen::VectorXd& f) const {
  return std::sqrt(std::max(0.0, inner_m(f, f)));
}

double LaplaceOperator::energy(const Eigen::VectorXd& f) const {
  return dirichlet_energy(graph_, f);
}

Eigen::MatrixXd LaplaceOperator::symmetrized() const {
  const int n = graph_.n();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : graph_.edges) {
    S(e.i, e.i) += e.w;
    S(e.j, e.j) += e.w;
    S(e.i, e.j) -= e.w;
    S(e.j, e.i) -= e.w;
  }
  Eigen::VectorXd inv_sqrt = graph_.node_mass.array().rsqrt();
  return inv_sqrt.asDiagonal() * S * inv_sqrt.asDiagonal();
}

namespace {

// Shift-invert Lanczos with full reorthogonalization for the k smallest
// eigenpairs of the symmetrized operator; used above the dense threshold.
// The bottom of a Laplacian spectrum is clustered, so plain Lanczos stalls;
// working on (S + sigma I)^{-1} separates it.
void lanczos_smallest(const Eigen::MatrixXd& S, int k, Eigen::VectorXd& vals,
                      Eigen::MatrixXd& vecs) {
  const int n = static_cast<int>(S.rows());
  const double sigma = std::max(1e-8, 1e-8 * S.diagonal().maxCoeff());
  Eigen::LDLT<Eigen::MatrixXd> solver(
      S + sigma * Eigen::MatrixXd::Identity(n, n));

  const int m = std::min(n, std::max(3 * k + 12, 36));
  Eigen::MatrixXd V(n, m);
  Eigen::VectorXd alpha(m), beta(m);
  Rng rng(12345);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  v.normalize();
  V.col(0) = v;
  Eigen::VectorXd w;
  for (int j = 0; j < m; ++j) {
    w = solver.solve(V.col(j));
    alpha(j) = V.col(j).dot(w);
    w -= alpha(j) * V.col(j);
    if (j > 0) w -= beta(j - 1) * V.col(j - 1);
    for (int r = 0; r <= j; ++r) w -= (V.col(r).dot(w)) * V.col(r);  // reorthogonalize
    beta(j) = w.norm();
    if (j + 1 < m) {
      if (beta(j) < 1e-14) {
        for (int i = 0; i < n; ++i) w(i) = rng.normal();
        for (int r = 0; r <= j; ++r) w -= (V.col(r).dot(w)) * V.col(r);
        w.normalize();
        beta(j) = 0.0;
        V.col(j + 1) = w;
      } else {
        V.col(j + 1) = w / beta(j);
      }
    }
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    T(j, j) = alpha(j);
    if (j + 1 < m) T(j, j + 1) = T(j + 1, j) = beta(j);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  // largest Ritz values of the inverse are the smallest eigenvalues of S
  vals.resize(k);
  vecs.resize(n, k);
  for (int c = 0; c < k; ++c) {
    const int src = m - 1 - c;
    vals(c) = 1.0 / es.eigenvalues()(src) - sigma;
    vecs.col(c) = V * es.eigenvectors().col(src);
  }

}

}  // namespace

Spectrum spectrum(const LaplaceOperator& op, int k, const SpectrumOptions& opt) {
  const int n = op.n();
  if (k < 1 || k > n) throw std::invalid_argument("spectrum: k out of range");
  const Eigen::MatrixXd S = op.symmetrized();

  Eigen::VectorXd vals;
  Eigen::MatrixXd y;
  if (n <= opt.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectrum: eigensolver failed");
    vals = es.eigenvalues().head(k);
    y = es.eigenvectors().leftCols(k);
  } else {
    lanczos_smallest(S, k, vals, y);
  }

  Spectrum out;
  out.eigenvalues = vals;
  const Eigen::VectorXd inv_sqrt = op.graph().node_mass.array().rsqrt();
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXd v = inv_sqrt.asDiagonal() * y.col(c);
    const double nm = op.norm_m(v);
    if (nm > 0) v /= nm;
    out.vecs.push_back(v);
  }
  for (int c = 0; c < k; ++c) {
    const Eigen::VectorXd r = op.apply(out.vecs[c]) - vals(c) * out.vecs[c];
    out.max_residual = std::max(out.max_residual, op.norm_m(r));
  }
  if (out.max_residual > opt.residual_tol)
    throw std::runtime_error("spectrum: residual above tolerance");
  int zero_mult = 0;
  for (int c = 0; c < k; ++c)
    if (std::abs(vals(c)) < 1e-10) ++zero_mult;
  out.zero_multiplicity_flagged = zero_mult > 1;
  return out;
}

Eigen::VectorXd resolvent(const LaplaceOperator& op, const Eigen::VectorXd& f, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("resolvent: tau must be positive");
  const int n = op.n();
  // (M + tau L_w) g = M f, SPD
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : op.graph().edges) {
    A(e.i, e.i) += tau * e.w;
    A(e.j, e.j) += tau * e.w;
    A(e.i, e.j) -= tau * e.w;
    A(e.j, e.i) -= tau * e.w;
  }
  for (int i = 0; i < n; ++i) A(i, i) += op.graph().node_mass(i);
  Eigen::VectorXd rhs = f.array() * op.graph().node_mass.array();
  Eigen::VectorXd g = A.ldlt().solve(rhs);
  // iterative refinement keeps the linear-system residual at machine level
  Eigen::VectorXd resid = rhs - A * g;
  g += A.ldlt().solve(resid);
  return g;
}

Eigen::VectorXd heat_semigroup(const LaplaceOperator& op, const Eigen::VectorXd& f, double t,
                               int k_steps, HeatMode mode) {
  if (t < 0.0) throw std::invalid_argument("heat_semigroup: t must be >= 0");
  if (t == 0.0) return f;
  if (mode == HeatMode::IteratedResolvent) {
    if (k_steps < 1) throw std::invalid_argument("heat_semigroup: k_steps must be >= 1");
    Eigen::VectorXd g = f;
    const double tau = t / k_steps;
    for (int s = 0; s < k_steps; ++s) g = resolvent(op, g, tau);
    return g;
  }
  const auto sp = spectrum(op, op.n());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(op.n());
  for (int c = 0; c < op.n(); ++c)
    out += std::exp(-sp.eigenvalues(c) * t) * op.inner_m(f, sp.vecs[c]) * sp.vecs[c];
  return out;
}

double quadratic_form_check(const GraphDirichlet& graph, int trials, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  Eigen::VectorXd f(graph.n()), g(graph.n());
  for (int t = 0; t < trials; ++t) {
    for (int i = 0; i < graph.n(); ++i) {
      f(i) = rng.uniform(-1.0, 1.0);
      g(i) = rng.uniform(-1.0, 1.0);
    }
    const double lhs = dirichlet_energy(graph, f + g) + dirichlet_energy(graph, f - g);
    const double rhs = 2.0 * dirichlet_energy(graph, f) + 2.0 * dirichlet_energy(graph, g);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

WlstiFit wlsti_fit(const FinitePmmSpace& space, const GraphDirichlet& graph, double A,
                   int random_family, std::uint64_t seed) {
  if (A < 0.0) throw std::invalid_argument("wlsti_fit: A must be >= 0");
  LaplaceOperator op(graph);
  WlstiFit out;

  // constants have E = 0; feasibility there requires
  // (sum d^2 m)^(1/2) <= A (sum m)^(1/2)
  double d2m = 0.0;
  for (int i = 0; i < space.n(); ++i) {
    const double d = space.dist(i, space.base);
    d2m += d * d * graph.node_mass(i);
  }
  out.infeasible_on_constants = std::sqrt(d2m) > A * std::sqrt(graph.node_mass.sum()) + 1e-12;

  std::vector<Eigen::VectorXd> family;
  const int k = std::min(space.n(), 8);
  const auto sp = spectrum(op, k);
  for (const auto& v : sp.vecs) family.push_back(v);
  Rng rng(seed);
  for (int t = 0; t < random_family; ++t) {
    Eigen::VectorXd f(space.n());
    for (int i = 0; i < space.n(); ++i) f(i) = rng.normal();
    // smooth the random vector a little so the family spans both regimes
    if (t % 2 == 0) f = resolvent(op, f, 0.1);
    family.push_back(f);
  }
  for (int i = 0; i < space.n(); ++i) {
    Eigen::VectorXd spike = Eigen::VectorXd::Zero(space.n());
    spike(i) = 1.0;
    family.push_back(spike);
  }

  for (const auto& f : family) {
    const double e = dirichlet_energy(graph, f);
    if (e <= 1e-14) continue;
    double lhs2 = 0.0;
    for (int i = 0; i < space.n(); ++i) {
      const double d = space.dist(i, space.base);
      lhs2 += d * d * f(i) * f(i) * graph.node_mass(i);
    }
    const double deficit = std::sqrt(lhs2) - A * op.norm_m(f);
    if (deficit > 0) out.B = std::max(out.B, deficit / std::sqrt(e));
    ++out.family_size;
  }
  return out;
}

EigenTable eigen_convergence(const std::vector<GraphDirichlet>& graphs, int k,
                             const SpectrumOptions& opt) {
  EigenTable table;
  table.lambda.resize(k, static_cast<Eigen::Index>(graphs.size()));
  for (std::size_t c = 0; c < graphs.size(); ++c) {
    LaplaceOperator op(graphs[c]);
    const auto sp = spectrum(op, k, opt);
    table.lambda.col(static_cast<Eigen::Index>(c)) = sp.eigenvalues;
    table.zero_multiplicity_flag.push_back(sp.zero_multiplicity_flagged);
  }
  return table;
}

}  // namespace mmgeo::spectral
