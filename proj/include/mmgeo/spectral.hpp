#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mmgeo/graph.hpp"
#include "mmgeo/space.hpp"

namespace mmgeo::spectral {

/// Weighted graph Laplacian (L f)_i = (1/m_i) sum_j w_ij (f_i - f_j),
/// self-adjoint in the m-weighted inner product with <Lf, f>_m = 2 E(f).
class LaplaceOperator {
 public:
  explicit LaplaceOperator(GraphDirichlet graph);

  const GraphDirichlet& graph() const { return graph_; }
  int n() const { return graph_.n(); }
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;
  double inner_m(const Eigen::VectorXd& f, const Eigen::VectorXd& g) const;
  double norm_m(const Eigen::VectorXd& f) const;
  double energy(const Eigen::VectorXd& f) const;  // E(f)

  /// Dense symmetrized matrix M^{-1/2} L_w M^{-1/2} (for the eigensolver).
  Eigen::MatrixXd symmetrized() const;

 private:
  GraphDirichlet graph_;
  par::EdgeCsr csr_;
};

struct Spectrum {
  Eigen::VectorXd eigenvalues;        // nondecreasing
  std::vector<Eigen::VectorXd> vecs;  // m-orthonormal
  double max_residual = 0.0;          // ||L v - lambda v||_m
  bool zero_multiplicity_flagged = false;  // eigenvalue 0 with multiplicity > 1
};

struct SpectrumOptions {
  int dense_threshold = 2000;  // Lanczos above
  double residual_tol = 1e-8;
  int minmax_samples = 64;     // unit vectors sampled per eigenspace check
};

/// k smallest eigenpairs. Dense solve on the symmetrized operator up to the
/// threshold, Lanczos with full reorthogonalization above it. The min-max
/// characterization is spot-checked on sampled unit vectors of the leading
/// subspaces.
Spectrum spectrum(const LaplaceOperator& op, int k, const SpectrumOptions& opt = {});

/// Resolvent (I + tau L)^{-1} f, i.e. the minimizer of
/// 1/(2 tau) ||g - f||_m^2 + E(g).
Eigen::VectorXd resolvent(const LaplaceOperator& op, const Eigen::VectorXd& f, double tau);

enum class HeatMode { IteratedResolvent, SpectralExact };

/// Heat semigroup H_t f: either the iterated resolvent J_{t/k}^k f or the
/// spectral expansion sum e^{-lambda t} <f, v>_m v.
Eigen::VectorXd heat_semigroup(const LaplaceOperator& op, const Eigen::VectorXd& f, double t,
                               int k_steps, HeatMode mode = HeatMode::IteratedResolvent);

/// max |E(f+g) + E(f-g) - 2E(f) - 2E(g)| over random pairs; the discrete
/// quadratic-form (parallelogram) certificate.
double quadratic_form_check(const GraphDirichlet& graph, int trials, std::uint64_t seed = 1);

struct WlstiFit {
  double B = 0.0;
  bool infeasible_on_constants = false;
  int family_size = 0;
};

/// Lower estimate of the minimal B with
/// (sum d^2(., base) f^2 m)^(1/2) <= A ||f||_m + B sqrt(E(f)),
/// maximized over eigenvectors, smoothed random vectors and spikes.
WlstiFit wlsti_fit(const FinitePmmSpace& space, const GraphDirichlet& graph, double A,
                   int random_family = 32, std::uint64_t seed = 1);

struct MoscoRow {
  int index = 0;
  double energy_n = 0.0;
  double energy_limit = 0.0;
  double energy_gap = 0.0;     // |E_n(f_n) - E_inf(f_inf)|
  double l2_norm_gap = 0.0;    // | ||f_n||^2_{m_n} - ||f_inf||^2_{m_inf} |
  double test_integral_gap = 0.0;
  double liminf_margin = 0.0;  // min over adversarial family of E_n - E_inf(f_inf)
  bool liminf_flag = false;    // some family member dips below -tol
};

struct MoscoReport {
  std::vector<MoscoRow> rows;
};

/// One ladder element: a space+graph, its cross distances to the limit space
/// (columns index limit points), used both for the recovery coupling and the
/// Lipschitz test family.
struct MoscoElement {
  FinitePmmSpace space;
  GraphDirichlet graph;
  Eigen::MatrixXd cross_to_limit;
};

/// Recovery sequences f_n from f_inf by coupling-conditional expectation;
/// reports energy and strong-L2 gaps per element plus a liminf probe over a
/// documented adversarial family (spiked / smoothed / transported
/// perturbations of f_n). The liminf side samples a family rather than all
/// weakly convergent sequences.
MoscoReport mosco_diagnostic(const std::vector<MoscoElement>& ladder,
                             const FinitePmmSpace& limit_space, const GraphDirichlet& limit_graph,
                             const Eigen::VectorXd& f_inf, double tol = 1e-9,
                             std::uint64_t seed = 1);

/// k x ladder-size table of Laplacian eigenvalues, one Spectrum per element.
struct EigenTable {
  Eigen::MatrixXd lambda;  // k rows, one column per ladder element
  std::vector<bool> zero_multiplicity_flag;
};

EigenTable eigen_convergence(const std::vector<GraphDirichlet>& graphs, int k,
                             const SpectrumOptions& opt = {});

}  // namespace mmgeo::spectral
