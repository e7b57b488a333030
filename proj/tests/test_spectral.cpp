#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mmgeo/lab.hpp"
#include "mmgeo/spectral.hpp"

using namespace mmgeo;
using namespace mmgeo::spectral;

namespace {
GraphDirichlet unit_cycle(int n) {
  GraphDirichlet g;
  g.node_mass = Eigen::VectorXd::Ones(n);
  for (int i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n, 1.0});
  return g;
}
}  // namespace

TEST_CASE("laplacian") {
  SUBCASE("single node is the zero operator") {
    GraphDirichlet g;
    g.node_mass = Eigen::VectorXd::Ones(1);
    LaplaceOperator op(g);
    Eigen::VectorXd f(1);
    f << 3.0;
    CHECK(op.apply(f)(0) == 0.0);
  }
  SUBCASE("two nodes with unit weight have eigenvalues 0 and 2") {
    GraphDirichlet g;
    g.node_mass = Eigen::VectorXd::Ones(2);
    g.edges = {{0, 1, 1.0}};
    LaplaceOperator op(g);
    const auto sp = spectrum(op, 2);
    CHECK(sp.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sp.eigenvalues(1) == doctest::Approx(2.0));
  }
  SUBCASE("unit cycle matches the cosine formula") {
    const int n = 12;
    LaplaceOperator op(unit_cycle(n));
    const auto sp = spectrum(op, n);
    std::vector<double> expected;
    for (int k = 0; k < n; ++k) expected.push_back(2.0 - 2.0 * std::cos(2.0 * M_PI * k / n));
    std::sort(expected.begin(), expected.end());
    for (int k = 0; k < n; ++k)
      CHECK(sp.eigenvalues(k) == doctest::Approx(expected[k]).epsilon(1e-10));
  }
  SUBCASE("self-adjointness and the form identity on random vectors") {
    Rng rng(3);
    const auto bench = lab::gen_circle(24, 2.0);
    LaplaceOperator op(bench.graph);
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd f(24), g(24);
      for (int i = 0; i < 24; ++i) {
        f(i) = rng.normal();
        g(i) = rng.normal();
      }
      CHECK(op.inner_m(op.apply(f), g) ==
            doctest::Approx(op.inner_m(f, op.apply(g))).epsilon(1e-12));
      CHECK(op.inner_m(op.apply(f), f) == doctest::Approx(2.0 * op.energy(f)).epsilon(1e-12));
    }
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(24);
    CHECK(op.apply(ones).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("zero node mass is rejected") {
    GraphDirichlet g;
    g.node_mass = Eigen::VectorXd::Zero(2);
    g.edges = {{0, 1, 1.0}};
    CHECK_THROWS_AS(LaplaceOperator{g}, std::invalid_argument);
  }
}

TEST_CASE("spectrum details") {
  const int n = 8;
  LaplaceOperator op(unit_cycle(n));
  const auto sp = spectrum(op, n);
  SUBCASE("constant eigenvector at zero on connected graphs") {
    CHECK(sp.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
    const auto& v = sp.vecs[0];
    CHECK((v.array() - v(0)).abs().maxCoeff() <= 1e-8);
    CHECK_FALSE(sp.zero_multiplicity_flagged);
  }
  SUBCASE("pair multiplicities") {
    CHECK(sp.eigenvalues(1) == doctest::Approx(sp.eigenvalues(2)).epsilon(1e-10));
    CHECK(sp.eigenvalues(3) == doctest::Approx(sp.eigenvalues(4)).epsilon(1e-10));
  }
  SUBCASE("m-orthonormality") {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        CHECK(op.inner_m(sp.vecs[a], sp.vecs[b]) ==
              doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-8));
  }
  SUBCASE("min-max certificate on sampled unit vectors of leading subspaces") {
    Rng rng(5);
    for (int k = 1; k <= 4; ++k) {
      // the span of the first k eigenvectors realizes max 2E = lambda_k
      double worst = 0.0;
      for (int t = 0; t < 64; ++t) {
        Eigen::VectorXd coef(k);
        for (int c = 0; c < k; ++c) coef(c) = rng.normal();
        Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
        for (int c = 0; c < k; ++c) f += coef(c) * sp.vecs[c];
        const double nm = op.norm_m(f);
        if (nm < 1e-12) continue;
        f /= nm;
        worst = std::max(worst, 2.0 * op.energy(f));
      }
      CHECK(worst <= sp.eigenvalues(k - 1) + 1e-6);
    }
  }
  SUBCASE("disconnected graphs flag the multiple zero eigenvalue") {
    GraphDirichlet g;
    g.node_mass = Eigen::VectorXd::Ones(4);
    g.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
    LaplaceOperator op2(g);
    CHECK(spectrum(op2, 4).zero_multiplicity_flagged);
  }
}

TEST_CASE("lanczos path agrees with the closed form on a large cycle") {
  const int n = 2400;  // above the dense threshold
  LaplaceOperator op(unit_cycle(n));
  SpectrumOptions opt;
  opt.residual_tol = 1e-8;
  const auto sp = spectrum(op, 3, opt);
  CHECK(sp.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-9));
  const double l1 = 2.0 - 2.0 * std::cos(2.0 * M_PI / n);
  CHECK(sp.eigenvalues(1) == doctest::Approx(l1).epsilon(1e-6));
  CHECK(sp.eigenvalues(2) == doctest::Approx(l1).epsilon(1e-6));
}

TEST_CASE("resolvent") {
  const auto bench = lab::gen_circle(16);
  LaplaceOperator op(bench.graph);
  Rng rng(7);
  SUBCASE("constants are fixed points") {
    Eigen::VectorXd c = Eigen::VectorXd::Constant(16, 2.5);
    CHECK((resolvent(op, c, 0.3) - c).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("tau to zero recovers the input") {
    Eigen::VectorXd f(16);
    for (int i = 0; i < 16; ++i) f(i) = rng.normal();
    double first = -1.0, prev = std::numeric_limits<double>::infinity();
    for (double tau : {1.0, 1e-2, 1e-4}) {
      const double gap = op.norm_m(resolvent(op, f, tau) - f);
      CHECK(gap < prev);
      if (first < 0) first = gap;
      prev = gap;
    }
    CHECK(prev <= 0.2 * first);
  }
  SUBCASE("two-node closed form") {
    GraphDirichlet g;
    g.node_mass = Eigen::VectorXd::Ones(2);
    g.edges = {{0, 1, 1.0}};
    LaplaceOperator op2(g);
    Eigen::VectorXd f(2);
    f << 1.0, 0.0;
    const double tau = 0.25;
    // (I + tau L) g = f with L = [[1,-1],[-1,1]]: solve explicitly
    Eigen::Matrix2d A;
    A << 1 + tau, -tau, -tau, 1 + tau;
    const Eigen::Vector2d expect = A.inverse() * f;
    const auto got = resolvent(op2, f, tau);
    CHECK(got(0) == doctest::Approx(expect(0)).epsilon(1e-12));
    CHECK(got(1) == doctest::Approx(expect(1)).epsilon(1e-12));
  }
  SUBCASE("contraction and variational optimality") {
    Eigen::VectorXd f(16);
    for (int i = 0; i < 16; ++i) f(i) = rng.normal();
    const double tau = 0.2;
    const auto g = resolvent(op, f, tau);
    CHECK(op.norm_m(g) <= op.norm_m(f) + 1e-12);
    auto objective = [&](const Eigen::VectorXd& x) {
      return op.norm_m(x - f) * op.norm_m(x - f) / (2 * tau) + op.energy(x);
    };
    const double at_g = objective(g);
    CHECK(at_g <= objective(f) + 1e-12);
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd pert = g;
      for (int i = 0; i < 16; ++i) pert(i) += 0.01 * rng.normal();
      CHECK(at_g <= objective(pert) + 1e-12);
    }
  }
}

TEST_CASE("heat_semigroup") {
  const auto bench = lab::gen_circle(16);
  LaplaceOperator op(bench.graph);
  const int n = 16;
  SUBCASE("t = 0 is the identity") {
    Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(n, 0.0, 1.0);
    CHECK(heat_semigroup(op, f, 0.0, 4) == f);
  }
  SUBCASE("constants are invariant") {
    Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 1.0);
    CHECK((heat_semigroup(op, c, 0.5, 8) - c).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((heat_semigroup(op, c, 0.5, 1, HeatMode::SpectralExact) - c).cwiseAbs().maxCoeff() <=
          1e-10);
  }
  SUBCASE("first cosine mode decays with its eigenvalue") {
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f(i) = std::cos(2.0 * M_PI * i / n);
    const double lam = 2.0 * n * n * (1.0 - std::cos(2.0 * M_PI / n));
    const double t = 0.01;
    const auto g = heat_semigroup(op, f, t, 1, HeatMode::SpectralExact);
    CHECK((g - std::exp(-lam * t) * f).cwiseAbs().maxCoeff() <= 1e-10);
  }
  SUBCASE("semigroup property and L2 contraction in spectral mode") {
    Rng rng(9);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f(i) = rng.normal();
    const auto one = heat_semigroup(op, f, 0.02, 1, HeatMode::SpectralExact);
    const auto two = heat_semigroup(op, one, 0.03, 1, HeatMode::SpectralExact);
    const auto direct = heat_semigroup(op, f, 0.05, 1, HeatMode::SpectralExact);
    CHECK((two - direct).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(op.norm_m(direct) <= op.norm_m(f) + 1e-12);
  }
  SUBCASE("iterated resolvent obeys the 2E(f) t/k envelope") {
    Rng rng(10);
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd f(n);
      for (int i = 0; i < n; ++i) f(i) = rng.normal();
      const double horizon = 0.1;
      const auto exact = heat_semigroup(op, f, horizon, 1, HeatMode::SpectralExact);
      for (int k : {1, 4, 16}) {
        const auto approx = heat_semigroup(op, f, horizon, k);
        const double err2 = std::pow(op.norm_m(approx - exact), 2.0);
        CHECK(err2 <= 2.0 * op.energy(f) * horizon / k + 1e-12);
      }
    }
  }
}

TEST_CASE("quadratic_form_check") {
  const auto bench = lab::gen_circle(50);
  SUBCASE("floors at zero for f = g and f = -g") {
    const double e1 = dirichlet_energy(bench.graph, Eigen::VectorXd::Ones(50));
    CHECK(e1 == 0.0);
  }
  SUBCASE("random pairs satisfy the parallelogram identity") {
    CHECK(quadratic_form_check(bench.graph, 100, 1) <= 1e-10);
  }
}

TEST_CASE("wlsti_fit") {
  SUBCASE("one-point space needs no gradient term") {
    FinitePmmSpace p = testutil::point_space();
    GraphDirichlet g;
    g.node_mass = Eigen::VectorXd::Ones(1);
    const auto fit = wlsti_fit(p, g, 0.0);
    CHECK(fit.B == 0.0);
    CHECK_FALSE(fit.infeasible_on_constants);
  }
  SUBCASE("bounded support with A = diameter is free") {
    const auto bench = lab::gen_circle(20);
    const double diam = bench.space.dist.maxCoeff();
    const auto fit = wlsti_fit(bench.space, bench.graph, diam);
    CHECK(fit.B == doctest::Approx(0.0));
    CHECK_FALSE(fit.infeasible_on_constants);
  }
  SUBCASE("estimate is stable under enlarging the random family") {
    const auto bench = lab::gen_circle(24);
    const double A = 0.1;
    const auto small = wlsti_fit(bench.space, bench.graph, A, 32, 2);
    const auto big = wlsti_fit(bench.space, bench.graph, A, 64, 2);
    CHECK(big.B >= small.B - 1e-12);  // sup over a superset
    CHECK(big.B <= 1.1 * small.B + 1e-12);
  }
}

TEST_CASE("mosco_diagnostic") {
  SUBCASE("constant ladder has vanishing gaps") {
    const auto bench = lab::gen_circle(24);
    Eigen::VectorXd f(24);
    for (int i = 0; i < 24; ++i) f(i) = std::cos(2.0 * M_PI * i / 24);
    std::vector<MoscoElement> ladder;
    for (int r = 0; r < 3; ++r)
      ladder.push_back({bench.space, bench.graph, bench.space.dist});
    const auto rep = mosco_diagnostic(ladder, bench.space, bench.graph, f);
    for (const auto& row : rep.rows) {
      CHECK(row.energy_gap <= 1e-9);
      CHECK(row.l2_norm_gap <= 1e-9);
      CHECK(row.test_integral_gap <= 1e-9);
      CHECK_FALSE(row.liminf_flag);
    }
  }
  SUBCASE("cycle refinements shrink the energy gap") {
    std::vector<int> sizes{8, 16, 32, 64};
    std::vector<lab::CircleBenchmark> benches;
    for (int n : sizes) benches.push_back(lab::gen_circle(n));
    const auto& fine = benches.back();
    Eigen::VectorXd f(fine.space.n());
    for (int i = 0; i < fine.space.n(); ++i)
      f(i) = std::cos(2.0 * M_PI * i / fine.space.n());
    std::vector<MoscoElement> ladder;
    for (std::size_t c = 0; c + 1 < benches.size(); ++c) {
      Eigen::MatrixXd cross(benches[c].space.n(), fine.space.n());
      for (int i = 0; i < benches[c].space.n(); ++i)
        for (int j = 0; j < fine.space.n(); ++j) {
          const double gap =
              std::abs(static_cast<double>(i) / sizes[c] - static_cast<double>(j) / sizes.back());
          cross(i, j) = std::min(gap, 1.0 - gap);
        }
      ladder.push_back({benches[c].space, benches[c].graph, cross});
    }
    const auto rep = mosco_diagnostic(ladder, fine.space, fine.graph, f);
    for (std::size_t r = 0; r + 1 < rep.rows.size(); ++r)
      CHECK(rep.rows[r + 1].energy_gap < rep.rows[r].energy_gap);
  }
  SUBCASE("mass perturbations give O(1/n) gaps") {
    const auto bench = lab::gen_circle(20);
    Eigen::VectorXd f(20);
    for (int i = 0; i < 20; ++i) f(i) = std::cos(2.0 * M_PI * i / 20);
    std::vector<MoscoElement> ladder;
    std::vector<int> enns{4, 8, 16};
    for (int n : enns) {
      FinitePmmSpace s = bench.space;
      s.mass *= (1.0 + 1.0 / n);
      ladder.push_back({s, eps_graph(s, 1.5 / 20.0), bench.space.dist});
    }
    const auto rep = mosco_diagnostic(ladder, bench.space, bench.graph, f);
    for (std::size_t r = 0; r < rep.rows.size(); ++r)
      CHECK(rep.rows[r].energy_gap <= 3.0 * dirichlet_energy(bench.graph, f) / enns[r]);
  }
}

TEST_CASE("eigen_convergence") {
  SUBCASE("constant ladder has constant columns") {
    const auto bench = lab::gen_circle(16);
    std::vector<GraphDirichlet> graphs{bench.graph, bench.graph, bench.graph};
    const auto table = eigen_convergence(graphs, 4);
    for (int j = 0; j < 4; ++j) {
      CHECK(table.lambda(j, 0) == doctest::Approx(table.lambda(j, 1)).epsilon(1e-12));
      CHECK(table.lambda(j, 1) == doctest::Approx(table.lambda(j, 2)).epsilon(1e-12));
    }
  }
  SUBCASE("scaled cycles approach the closed-form limits monotonically") {
    std::vector<int> sizes{16, 32, 64, 128};
    std::vector<GraphDirichlet> graphs;
    for (int n : sizes) graphs.push_back(lab::gen_circle(n).graph);
    const auto table = eigen_convergence(graphs, 5);
    auto lam_inf = [](int j) {
      const int pair = (j + 1) / 2;
      return std::pow(2.0 * M_PI * pair, 2.0);
    };
    for (int j = 1; j <= 4; ++j) {
      double prev = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        const double gap = std::abs(table.lambda(j, c) - lam_inf(j));
        CHECK(gap < prev);
        prev = gap;
      }
      CHECK(prev <= 0.02 * lam_inf(j));
    }
  }
}
