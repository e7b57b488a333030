#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmgeo/graph.hpp"
#include "mmgeo/space.hpp"

namespace mmgeo::lab {

/// Unit interval with a heavy atom: n+1 uniform grid points on [0,1] carrying
/// Lebesgue cell weights scaled to total 1/n, plus mass 1 - 1/n at the grid
/// point nearest 1/2, which is also the basepoint.
FinitePmmSpace gen_interval_with_atom(int n);

/// Two separated segments [0, 1-1/n] and [2, 2+1/n] with Lebesgue weights on
/// a grid of pitch 1/(4n); base at 0. The diameter stays >= 2 while the right
/// cluster carries mass 1/n.
FinitePmmSpace gen_split_interval(int n);

/// Uniform grid on [0,1] with Lebesgue cell weights, base at 0.
FinitePmmSpace gen_unit_interval(int n);

struct CircleBenchmark {
  FinitePmmSpace space;
  GraphDirichlet graph;
};

/// n equally spaced points on a circle of circumference `circumference` with
/// arc-length metric and total mass `total_mass`; nearest-neighbor graph
/// calibrated so that the Dirichlet energy approximates the circle integral.
/// With circumference 1 the Laplacian eigenvalues are 2 n^2 (1 - cos(2 pi j / n)).
CircleBenchmark gen_circle(int n, double total_mass = 1.0, double circumference = 1.0);

struct PmghReport {
  double lower = 0.0;   // no correspondence can beat this epsilon
  double upper = 0.0;   // epsilon achieved by the constructed map
  bool bracket_only = false;
};

struct PmghOptions {
  std::vector<double> eps_grid;   // unused radii default to the base radius
  int local_search_iters = 200;
  std::uint64_t seed = 1;
  int cap = 256;                  // support size cap for the map search
};

/// Pointed measured Gromov-Hausdorff diagnostic: the lower bound comes from
/// distance-multiset infeasibility (any eps-map needs every realized distance
/// matched within eps), the upper bound from a greedy base-fixing map with
/// local search, scored by metric distortion plus test-integral gaps.
PmghReport pmgh_compare(const FinitePmmSpace& a, const FinitePmmSpace& b,
                        const PmghOptions& opt = {});

struct ExperimentConfig {
  std::string family;          // convergence | flow | mosco-spectral
  std::vector<int> sizes;
  std::uint64_t seed = 1;
  std::string out_dir;
  double tol_scale = 1.0;
  std::string format = "csv";  // csv | json
};

struct SuiteResult {
  bool pass = true;
  std::vector<std::string> artifact_paths;
  std::string summary_json;
};

/// Runs one experiment family, writes CSV artifacts plus a JSON summary with
/// per-check pass/fail, and returns the overall verdict. Deterministic under
/// a fixed seed (byte-identical artifacts).
SuiteResult run_suite(const ExperimentConfig& config);

}  // namespace mmgeo::lab
