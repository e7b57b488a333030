#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mmgeo/space.hpp"
#include "mmgeo/transport.hpp"

namespace mmgeo::gromov {

/// Two spaces joined over an explicit cross-distance matrix. The block
/// matrix [[d1, cross], [cross^T, d2]] must be a valid pseudometric.
struct GluedSpace {
  FinitePmmSpace a;
  FinitePmmSpace b;
  Eigen::MatrixXd cross;  // n1 x n2
  double eta = 0.0;       // slack used by the coupling gluing

  Eigen::MatrixXd block_matrix() const;
  /// The union as one pmm space (masses concatenated, base from `a`).
  FinitePmmSpace as_space() const;
};

/// Glues along the support of a coupling: cross(i,j) = min over support
/// pairs (i',j') of d1(i,i') + eta + d2(j',j), with eta half the coupling
/// distortion (the smallest slack making every cross triangle valid).
GluedSpace glue_by_coupling(const FinitePmmSpace& a, const FinitePmmSpace& b,
                            const Eigen::MatrixXd& coupling);

struct DistanceBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::string lower_method;
  std::string upper_method;
};

struct SearchOptions {
  int seeds = 8;
  int rounds = 20;
  std::uint64_t seed = 1;
  bool refine_coordinates = false;  // per-entry refinement (exact-tiny only)
};

/// Upper bound on the weighted pointed distance: |log z1/z2| plus the best
/// embedding value found by alternating optimal couplings with support
/// gluings (cost = squared cross distance, plus the base cross distance).
double dpsi_upper(const FinitePmmSpace& a, const FinitePmmSpace& b, const WeightSpec& psi,
                  const SearchOptions& opt = {});

/// Certified lower bound: |log z1/z2| + W2 between the base-distance laws of
/// the psi-normalized measures (isometric embeddings preserve distances to
/// the basepoint, and pushing forward by a 1-Lipschitz map contracts W2).
double dpsi_lower(const FinitePmmSpace& a, const FinitePmmSpace& b, const WeightSpec& psi);

enum class PgwMode { ExactTiny, Bracket };

struct PgwOptions {
  PgwMode mode = PgwMode::Bracket;
  transport::CostSpec cost = transport::CostSpec::min1();
  SearchOptions search;
  int exact_tiny_cap = 4;  // support size cap per space in ExactTiny mode
};

/// Finite-mass pointed Gromov-weak distance: |log mass ratio| + inf over
/// cross metrics of [cross(base,base) + W_c of the normalized measures].
/// ExactTiny runs a dense multi-start alternation with LP cross steps and
/// coordinate refinement (supports capped); Bracket returns a certified
/// lower bound and a search upper bound.
DistanceBracket pgw_fm(const FinitePmmSpace& a, const FinitePmmSpace& b,
                       const PgwOptions& opt = {});

struct PgwSumOptions {
  PgwOptions per_k;
  int k_min = 0, k_max = 0;
  bool auto_range = true;  // derive the range from the dyadic stabilization scales
};

/// Dyadically weighted sum over cutoff rescalings:
/// sum_k 2^-|k| min(1, pgw_fm(a_[k], b_[k])). Outside the stabilization
/// range the terms are constant in k, so their geometric tails are summed
/// exactly; a user-specified narrower range gets a conservative tail bound
/// on the upper edge instead.
DistanceBracket pgw(const FinitePmmSpace& a, const FinitePmmSpace& b,
                    const PgwSumOptions& opt = {});

// ---- cylindrical pushforwards ----

/// Weighted atoms on the cone of N x N pseudmetric matrices: one atom per
/// ordered (N-1)-tuple of support points with the basepoint fixed first.
/// Atoms are canonicalized (coordinates 2..N sorted by base distance, then
/// row-lexicographically) and merged, so multiset equality is exactly
/// isomorphism-invariant.
struct CylMeasure {
  int order = 2;
  std::vector<Eigen::MatrixXd> atoms;
  std::vector<double> weights;

  double total_weight() const;
};

struct CylOptions {
  int max_order = 3;
  std::size_t max_atoms = 2000000;
};

CylMeasure cyl_pushforward(const FinitePmmSpace& space, int order, const CylOptions& opt = {});

/// True when the two atom lists coincide (same matrices and weights within tol).
bool cyl_equal(const CylMeasure& x, const CylMeasure& y, double tol = 0.0);

/// Diagnostic: |log of total-weight ratio| + W_c between the normalized atom
/// measures, with ground distance max-norm on matrix entries. Not a bound on
/// the pointed distance; zero on isomorphic pairs.
double cyl_discrepancy(const FinitePmmSpace& a, const FinitePmmSpace& b, int order,
                       const transport::CostSpec& cost = transport::CostSpec::min1(),
                       const CylOptions& opt = {});

struct ReconstructionResult {
  bool cyl_equal_up_to_order = true;
  int first_differing_order = -1;
  IsoResult iso;
};

/// Compares cylindrical pushforwards for N = 2..max_order and runs the
/// isomorphism search; on the decidable range equality up to support size + 1
/// must match the isomorphism verdict.
ReconstructionResult reconstruction_test(const FinitePmmSpace& a, const FinitePmmSpace& b,
                                         int max_order, const IsoOptions& iso_opt = {});

}  // namespace mmgeo::gromov
