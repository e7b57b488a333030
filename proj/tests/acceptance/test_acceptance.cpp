// Acceptance suite: one line per criterion, every tolerance pinned here.
// Exit code = number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "helpers.hpp"
#include "mmgeo/entropy_flow.hpp"
#include "mmgeo/gromov.hpp"
#include "mmgeo/io.hpp"
#include "mmgeo/lab.hpp"
#include "mmgeo/spectral.hpp"
#include "mmgeo/transport.hpp"

using namespace mmgeo;
using testutil::random_euclidean_space;
using testutil::random_probability;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, name,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) { return io::format_double(v); }

FinitePmmSpace point_space() { return testutil::point_space(); }

bool monotone_quarter(const std::vector<double>& v, double* ratio) {
  bool mono = true;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i + 1] > v[i] + 1e-12) mono = false;
  *ratio = v.front() / std::max(v.back(), 1e-300);
  return mono && v.back() <= 0.25 * v.front() + 1e-12;
}

// ---- criterion 1: metric axioms ----
void criterion_1() {
  Rng rng(1001);
  gromov::PgwOptions tiny;
  tiny.mode = gromov::PgwMode::ExactTiny;
  tiny.exact_tiny_cap = 3;
  double worst_triangle = 0.0;
  bool symmetric = true;
  for (int t = 0; t < 200; ++t) {
    const auto a = random_euclidean_space(1 + static_cast<int>(rng.below(3)), 2, rng, true);
    const auto b = random_euclidean_space(1 + static_cast<int>(rng.below(3)), 2, rng, true);
    const auto c = random_euclidean_space(1 + static_cast<int>(rng.below(3)), 2, rng, true);
    const double ab = gromov::pgw_fm(a, b, tiny).upper;
    const double ba = gromov::pgw_fm(b, a, tiny).upper;
    if (ab != ba) symmetric = false;
    const double ac = gromov::pgw_fm(a, c, tiny).upper;
    const double cb = gromov::pgw_fm(c, b, tiny).upper;
    worst_triangle = std::max(worst_triangle, ab - ac - cb);
  }
  bool pass = symmetric && worst_triangle <= 2e-3;

  const auto s = random_euclidean_space(5, 2, rng, true);
  const auto cost = transport::CostSpec::min1();
  double worst_w2 = 0.0, worst_wc = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto mu = random_probability(5, rng);
    const auto nu = random_probability(5, rng);
    const auto rho = random_probability(5, rng);
    worst_w2 = std::max(worst_w2, transport::w2(s, mu, rho) - transport::w2(s, mu, nu) -
                                      transport::w2(s, nu, rho));
    worst_wc = std::max(worst_wc, transport::wc(s, mu, rho, cost) -
                                      transport::wc(s, mu, nu, cost) -
                                      transport::wc(s, nu, rho, cost));
  }
  pass = pass && worst_w2 <= 1e-8 && worst_wc <= 1e-8;
  report(1, "metric axioms (pgw_fm exact-tiny, w2, wc)", pass,
         "pgw triangle excess " + fmt(worst_triangle) + ", w2 " + fmt(worst_w2) + ", wc " +
             fmt(worst_wc));
}

// ---- criterion 2: isomorphism invariance ----
void criterion_2() {
  Rng rng(1002);
  bool pass = true;
  double worst_upper = 0.0;
  for (int t = 0; t < 50; ++t) {
    const auto s = random_euclidean_space(2 + static_cast<int>(rng.below(7)), 2, rng, true);
    const auto p = permute(s, testutil::random_permutation(s.n(), rng));
    if (is_isomorphic(s, p).outcome != IsoOutcome::Isomorphic) pass = false;
    for (int order : {2, 3})
      if (!gromov::cyl_equal(gromov::cyl_pushforward(s, order),
                             gromov::cyl_pushforward(p, order), 0.0))
        pass = false;
    const double upper = gromov::pgw_fm(s, p, gromov::PgwOptions{}).upper;
    worst_upper = std::max(worst_upper, upper);
  }
  pass = pass && worst_upper <= 1e-6;
  report(2, "isomorphism invariance (witness, cyl multisets, pgw_fm upper)", pass,
         "worst pgw_fm upper " + fmt(worst_upper));
}

// ---- criterion 3: intro example convergence ----
void criterion_3() {
  const auto p = point_space();
  const auto psi = WeightSpec::gauss(16.0);
  std::vector<double> pgws, dpsis;
  for (int n : {4, 8, 16, 32}) {
    const auto s = lab::gen_interval_with_atom(n);
    pgws.push_back(gromov::pgw(s, p, gromov::PgwSumOptions{}).upper);
    dpsis.push_back(gromov::dpsi_upper(s, p, psi));
  }
  double r1, r2;
  const bool ok1 = monotone_quarter(pgws, &r1);
  const bool ok2 = monotone_quarter(dpsis, &r2);
  report(3, "interval-with-atom collapses to the point space", ok1 && ok2,
         "pgw decay x" + fmt(r1) + ", dpsi decay x" + fmt(r2));
}

// ---- criterion 4: pmG vs pmGH separation ----
void criterion_4() {
  std::vector<double> pgws;
  double min_pmgh = std::numeric_limits<double>::infinity();
  for (int n : {4, 8, 16, 32}) {
    const auto split = lab::gen_split_interval(n);
    const auto target = lab::gen_unit_interval(4 * n);
    pgws.push_back(gromov::pgw(split, target, gromov::PgwSumOptions{}).upper);
    min_pmgh = std::min(min_pmgh, lab::pmgh_compare(split, target).lower);
  }
  double r;
  const bool decay = monotone_quarter(pgws, &r);
  const bool gap = min_pmgh >= 0.5;
  report(4, "split interval: pgw decays while pmGH stays separated", decay && gap,
         "pgw decay x" + fmt(r) + ", min pmGH lower " + fmt(min_pmgh));
}

// ---- criterion 5: entropy identity ----
void criterion_5() {
  Rng rng(1005);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto s = random_euclidean_space(3 + static_cast<int>(rng.below(8)), 2, rng);
    const auto mu = random_probability(s.n(), rng);
    const double C = 0.1 + 3.0 * rng.uniform();
    worst = std::max(worst, flow::entropy_decomposition(mu, s, C).residual);
  }
  report(5, "entropy decomposition identity", worst <= 1e-10, "max residual " + fmt(worst));
}

// ---- criterion 6: Gamma-limsup recovery ----
void criterion_6() {
  Rng rng(1006);
  const auto s = random_euclidean_space(20, 2, rng);
  bool pass = true;
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto mu = random_probability(20, rng);
    for (int n = 2; n <= 11; ++n) {
      FinitePmmSpace tilted = s;
      tilted.mass *= (1.0 + std::pow(-1.0, n) / n);
      Eigen::MatrixXd coupling = (s.mass / s.total_mass()).asDiagonal();
      const auto rec = flow::recovery_sequence(mu, s, tilted, coupling);
      const double egap = std::abs(flow::entropy(rec, tilted) - flow::entropy(mu, s));
      const double wgap = transport::w2(tilted, rec, mu);
      worst = std::max({worst, egap - 5.0 / n, wgap - 5.0 / n});
      if (egap > 5.0 / n || wgap > 5.0 / n) pass = false;
    }
  }
  report(6, "recovery sequences meet the 5/n envelope", pass, "worst excess " + fmt(worst));
}

// shared flow fixtures
struct CircleFlow {
  lab::CircleBenchmark bench = lab::gen_circle(32);
  spectral::LaplaceOperator op{bench.graph};

  Eigen::VectorXd density_measure(const Eigen::VectorXd& f) const {
    Eigen::VectorXd mu = (f.array() * bench.space.mass.array()).cwiseMax(0.0);
    return mu / mu.sum();
  }
};

// ---- criterion 7: flow identification ----
void criterion_7(CircleFlow& cf) {
  const int n = 32;
  Eigen::VectorXd f0(n);
  for (int i = 0; i < n; ++i) f0(i) = 1.0 + 0.2 * std::cos(2.0 * M_PI * i / n);
  Eigen::VectorXd mu0 = cf.density_measure(f0);
  std::vector<double> gaps;
  for (double tau : {1e-2, 1e-3}) {
    const auto trace = flow::jko_flow(mu0, tau, 0.1, cf.bench.space, cf.bench.graph);
    double worst = 0.0;
    for (double t : {0.01, 0.05, 0.1}) {
      const int k = static_cast<int>(std::lround(t / tau));
      const auto ft = spectral::heat_semigroup(cf.op, f0, t, 1, spectral::HeatMode::SpectralExact);
      worst = std::max(worst, transport::w2(cf.bench.space, trace.states[k],
                                            cf.density_measure(ft)));
    }
    gaps.push_back(worst);
  }
  const bool pass = gaps[1] <= 5e-2 && gaps[1] <= gaps[0];
  report(7, "JKO flow tracks the spectral heat flow", pass,
         "gap(tau=1e-3) " + fmt(gaps[1]) + ", gap(tau=1e-2) " + fmt(gaps[0]));
}

// ---- criterion 8: EDE residual ----
void criterion_8(CircleFlow& cf) {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(32);
  mu(0) = 0.5;
  mu(16) = 0.5;
  std::vector<double> maxres;
  for (double tau : {1e-2, 1e-3}) {
    const auto trace = flow::jko_flow(mu, tau, 0.05, cf.bench.space, cf.bench.graph);
    const auto res = flow::ede_residual(trace, cf.bench.graph);
    maxres.push_back(*std::max_element(res.begin(), res.end()));
  }
  report(8, "EDE residual strictly shrinks with tau", maxres[1] < maxres[0],
         "tau=1e-3: " + fmt(maxres[1]) + ", tau=1e-2: " + fmt(maxres[0]));
}

// ---- criterion 9: contraction ----
void criterion_9(CircleFlow& cf) {
  const int n = 32;
  const double tau = 1e-3, T = 0.02;
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n), b = Eigen::VectorXd::Zero(n);
  a(0) = 1.0;
  b(8) = 1.0;
  const auto ta = flow::jko_flow(a, tau, T, cf.bench.space, cf.bench.graph);
  const auto tb = flow::jko_flow(b, tau, T, cf.bench.space, cf.bench.graph);
  const double jko_viol = flow::contraction_check(ta, tb, cf.bench.space, 0.0);

  // spectral flows from the same Diracs on the shared time grid
  flow::FlowTrace sa, sb;
  sa.tau = tb.tau;
  sb.tau = tb.tau;
  const Eigen::VectorXd fa = a.cwiseQuotient(cf.bench.space.mass);
  const Eigen::VectorXd fb = b.cwiseQuotient(cf.bench.space.mass);
  for (std::size_t k = 0; k < ta.times.size(); ++k) {
    const double t = ta.times[k];
    sa.times.push_back(t);
    sb.times.push_back(t);
    sa.states.push_back(cf.density_measure(
        spectral::heat_semigroup(cf.op, fa, t, 1, spectral::HeatMode::SpectralExact)));
    sb.states.push_back(cf.density_measure(
        spectral::heat_semigroup(cf.op, fb, t, 1, spectral::HeatMode::SpectralExact)));
  }
  const double spec_viol = flow::contraction_check(sa, sb, cf.bench.space, 0.0);
  const bool pass = spec_viol <= 1e-3 && jko_viol <= 5e-3;
  report(9, "W2 contraction at K = 0", pass,
         "spectral violation " + fmt(spec_viol) + ", JKO violation " + fmt(jko_viol));
}

// ---- criterion 10: a priori estimates ----
void criterion_10(CircleFlow& cf) {
  Rng rng(1010);
  const int n = 32;
  bool pass = true;
  double worst = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    const double a1 = rng.uniform(0.35, 0.6);
    const double a2 = rng.uniform(0.0, 0.25);
    const double p1 = rng.uniform(0.0, 1.0);
    const double p2 = rng.uniform(0.0, 1.0);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(i) / n;
      f(i) = 1.0 + a1 * std::cos(2.0 * M_PI * (x - p1)) + a2 * std::cos(4.0 * M_PI * (x - p2));
    }
    const auto mu = cf.density_measure(f);
    const auto trace = flow::jko_flow(mu, 1.0 / 32.0, 1.0 / 8.0, cf.bench.space, cf.bench.graph);
    const auto rep = flow::apriori_check(trace, cf.bench.space, 1.0, 0.0);
    pass = pass && rep.pass;
    worst = std::min({worst, rep.min_apriori_slack, rep.speed_bound_slack});
  }
  report(10, "a priori estimates on random starts (C = 1)", pass, "min slack " + fmt(worst));
}

// ---- criterion 11: quadratic form ----
void criterion_11() {
  double worst = 0.0;
  for (int n : {16, 32, 64, 128})
    worst = std::max(worst, spectral::quadratic_form_check(lab::gen_circle(n).graph, 100, 11));
  for (int n : {8, 16}) {
    const auto s = lab::gen_interval_with_atom(n);
    worst = std::max(worst,
                     spectral::quadratic_form_check(eps_graph(s, 1.5 / n), 100, 11));
  }
  report(11, "Dirichlet form is quadratic on all benchmark graphs", worst <= 1e-10,
         "max parallelogram residual " + fmt(worst));
}

// ---- criterion 12: spectral convergence ----
void criterion_12() {
  std::vector<int> sizes{16, 32, 64, 128};
  std::vector<GraphDirichlet> graphs;
  for (int n : sizes) graphs.push_back(lab::gen_circle(n).graph);
  const auto table = spectral::eigen_convergence(graphs, 5);
  auto lam_inf = [](int j) {
    const int pair = (j + 1) / 2;
    return std::pow(2.0 * M_PI * pair, 2.0);
  };
  bool monotone = true, final_ok = true;
  double worst_rel = 0.0;
  for (int j = 1; j <= 4; ++j) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      const double gap = std::abs(table.lambda(j, c) - lam_inf(j));
      if (gap >= prev) monotone = false;
      prev = gap;
    }
    worst_rel = std::max(worst_rel, prev / lam_inf(j));
    final_ok = final_ok && prev <= 0.02 * lam_inf(j);
  }
  report(12, "cycle ladder eigenvalues converge to the closed form", monotone && final_ok,
         "final relative error " + fmt(worst_rel));
}

// ---- criterion 13: resolvent/semigroup bound ----
void criterion_13(CircleFlow& cf) {
  Rng rng(1013);
  const int n = 32;
  const double t = 0.1;
  bool pass = true;
  double worst = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f(i) = rng.normal();
    const auto exact = spectral::heat_semigroup(cf.op, f, t, 1, spectral::HeatMode::SpectralExact);
    for (int k : {1, 4, 16, 64}) {
      const auto approx = spectral::heat_semigroup(cf.op, f, t, k);
      const double err2 = std::pow(cf.op.norm_m(approx - exact), 2.0);
      const double bound = 2.0 * cf.op.energy(f) * t / k;
      worst = std::max(worst, err2 - bound);
      if (err2 > bound + 1e-12) pass = false;
    }
  }
  report(13, "iterated resolvent obeys the 2E(f) t/k envelope", pass,
         "max excess " + fmt(worst));
}

// ---- criterion 14: determinism ----
void criterion_14() {
  namespace fs = std::filesystem;
  const std::string dir = (fs::temp_directory_path() / "mmgeo_acceptance_det").string();
  bool pass = true;
  for (const char* family : {"convergence", "mosco-spectral"}) {
    lab::ExperimentConfig cfg;
    cfg.family = family;
    cfg.sizes = std::string(family) == "convergence" ? std::vector<int>{4, 8}
                                                     : std::vector<int>{8, 16, 32};
    cfg.seed = 99;
    cfg.out_dir = dir;
    const auto r1 = lab::run_suite(cfg);
    std::vector<std::string> first;
    for (const auto& p : r1.artifact_paths) first.push_back(io::read_file(p));
    const auto r2 = lab::run_suite(cfg);
    for (std::size_t i = 0; i < r2.artifact_paths.size(); ++i)
      if (io::read_file(r2.artifact_paths[i]) != first[i]) pass = false;
    if (r1.summary_json != r2.summary_json) pass = false;
  }
  report(14, "suite reruns are byte-identical under a fixed seed", pass, "");
}

}  // namespace

int main() {
  std::printf("mmgeo acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  CircleFlow cf;
  criterion_7(cf);
  criterion_8(cf);
  criterion_9(cf);
  criterion_10(cf);
  criterion_11();
  criterion_12();
  criterion_13(cf);
  criterion_14();
  std::printf("%d of 14 criteria failed\n", failures);
  return failures;
}
