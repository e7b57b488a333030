#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "mmgeo/weights.hpp"

namespace mmgeo {

/// A finite pointed metric measure space: symmetric distance matrix,
/// nonnegative mass vector, and a basepoint index carrying positive mass.
/// Instances are value types and never mutated by the operations below.
struct FinitePmmSpace {
  Eigen::MatrixXd dist;
  Eigen::VectorXd mass;
  int base = 0;

  int n() const { return static_cast<int>(mass.size()); }
  double total_mass() const { return mass.sum(); }
  double dist_to_base(int i) const { return dist(i, base); }
  /// Largest distance from the basepoint to a support point.
  double radius_from_base() const;
  /// Smallest positive distance from the basepoint to a support point.
  double min_positive_base_dist() const;
  std::vector<int> support() const;  // indices with mass > 0
};

struct ValidationIssue {
  std::string what;
  int i = -1, j = -1, k = -1;
  double value = 0.0;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// Checks symmetry, zero diagonal, nonnegativity, the triangle inequality
/// (with additive slack 1e-9 * diameter), mass nonnegativity and positive
/// basepoint mass. Report-style: never throws.
ValidationReport validate(const FinitePmmSpace& space);

/// Throws std::invalid_argument when validate() finds issues.
void require_valid(const FinitePmmSpace& space, const char* where);

/// Drops zero-mass points; the basepoint index is remapped.
FinitePmmSpace support_restrict(const FinitePmmSpace& space);

/// Piecewise scalar cutoff: 1 on [0,1], 0 on [2,inf), values in [0,1].
struct CutoffSpec {
  std::function<double(double)> eval;
  double lipschitz = 1.0;

  /// zeta(r) = min(1, max(0, 2 - r)), Lipschitz constant 1.
  static CutoffSpec linear();
};

/// Mass rescaling m_k(x) = zeta(d(x, base) * 2^-k) * m(x).
FinitePmmSpace cutoff_rescale(const FinitePmmSpace& space, int k,
                              const CutoffSpec& zeta = CutoffSpec::linear());

/// Normalization by a weight applied to the base distance:
/// z = sum psi(d(., base)) m,  mass_out = psi(d(., base)) m / z.
struct ReweightResult {
  double z;
  FinitePmmSpace space;
};
ReweightResult reweight(const FinitePmmSpace& space, const WeightSpec& psi);

/// Gaussian tilt: z = sum exp(-C d^2(., base)) m, probability output.
/// (For finite spaces any C > 0 is admissible.)
ReweightResult exp_tilt(const FinitePmmSpace& space, double C);

/// sup over support points x and grid radii R of m(B_2R(x)) / m(B_R(x)).
double doubling_constant(const FinitePmmSpace& space, const std::vector<double>& radii);

/// Greedy closed-ball eps-net count of B_subset_radius(base) within supp(m).
/// Greedy may overcount the optimum; tests pin the exact value on small inputs.
int covering_number(const FinitePmmSpace& space, double eps, double subset_radius);

/// Mass of the closed ball of radius r around index center (support-agnostic).
double ball_mass(const FinitePmmSpace& space, int center, double r);

// ---- isomorphism testing ----

enum class IsoOutcome { Isomorphic, NotIsomorphic, Undecided };

struct IsoResult {
  IsoOutcome outcome = IsoOutcome::Undecided;
  /// For Isomorphic: support bijection, as a map from support indices of `a`
  /// to support indices of `b` (original index spaces).
  std::vector<std::pair<int, int>> witness;
  /// For NotIsomorphic: the first distinguishing invariant found.
  std::string certificate;
};

struct IsoOptions {
  double tol = 1e-9;
  int max_support = 10;  // branch-and-prune cap
};

/// Pointed isomorphism test on support restrictions: searches for a
/// base-fixing bijection preserving distances and masses within tol.
IsoResult is_isomorphic(const FinitePmmSpace& a, const FinitePmmSpace& b,
                        const IsoOptions& opt = {});

/// Relabels a space by a permutation (testing helper, also used by suites).
/// perm maps new index -> old index.
FinitePmmSpace permute(const FinitePmmSpace& space, const std::vector<int>& perm);

}  // namespace mmgeo
