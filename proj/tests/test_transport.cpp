#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mmgeo/transport.hpp"

using namespace mmgeo;
using namespace mmgeo::transport;
using testutil::random_probability;

TEST_CASE("optimal_coupling trivial instances") {
  SUBCASE("one-point") {
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
    CHECK(optimal_coupling(one, one, zero).value == 0.0);
  }
  SUBCASE("two Diracs pay the cost of their cell") {
    Eigen::VectorXd mu(2), nu(2);
    mu << 1, 0;
    nu << 0, 1;
    Eigen::MatrixXd cost(2, 2);
    cost << 0, 3.5, 3.5, 0;
    const auto res = optimal_coupling(mu, nu, cost);
    CHECK(res.value == doctest::Approx(3.5));
    CHECK(res.coupling.plan(0, 1) == doctest::Approx(1.0));
  }
  SUBCASE("marginal mismatch is rejected") {
    Eigen::VectorXd mu(1), nu(1);
    mu << 1.0;
    nu << 0.5;
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(1, 1);
    CHECK_THROWS_AS(optimal_coupling(mu, nu, cost), std::invalid_argument);
  }
}

TEST_CASE("simplex matches the exhaustive basis-enumeration oracle") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int m = 2 + static_cast<int>(rng.below(3));
    const int n = 2 + static_cast<int>(rng.below(3));
    const auto mu = random_probability(m, rng);
    const auto nu = random_probability(n, rng);
    Eigen::MatrixXd cost(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform();
    const auto res = optimal_coupling(mu, nu, cost);
    const double oracle = testutil::ot_oracle(mu, nu, cost);
    CHECK(res.value == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(res.coupling.max_marginal_error() <= 1e-10);
    CHECK(res.coupling.plan.minCoeff() >= 0.0);
  }
}

TEST_CASE("4x4 instances against the oracle") {
  Rng rng(123);
  for (int trial = 0; trial < 8; ++trial) {
    const auto mu = random_probability(4, rng);
    const auto nu = random_probability(4, rng);
    Eigen::MatrixXd cost(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) cost(i, j) = rng.uniform();
    CHECK(optimal_coupling(mu, nu, cost).value ==
          doctest::Approx(testutil::ot_oracle(mu, nu, cost)).epsilon(1e-9));
  }
}

TEST_CASE("w2 basics") {
  Rng rng(5);
  const auto s = testutil::random_euclidean_space(5, 2, rng, true);
  SUBCASE("identical marginals") {
    const auto mu = random_probability(5, rng);
    CHECK(w2(s, mu, mu) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("two Diracs") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(5), nu = Eigen::VectorXd::Zero(5);
    mu(0) = 1;
    nu(3) = 1;
    CHECK(w2(s, mu, nu) == doctest::Approx(s.dist(0, 3)));
  }
  SUBCASE("collinear three-point split") {
    FinitePmmSpace line;
    line.dist.resize(3, 3);
    line.dist << 0, 1, 2, 1, 0, 1, 2, 1, 0;
    line.mass = Eigen::VectorXd::Constant(3, 1.0 / 3);
    line.base = 0;
    Eigen::VectorXd mu(3), nu(3);
    mu << 0.5, 0.5, 0;
    nu << 0, 0.5, 0.5;
    // brute-force value over the coupling polytope equals 1
    const Eigen::MatrixXd cost = line.dist.array().square();
    CHECK(testutil::ot_oracle(mu, nu, cost) == doctest::Approx(1.0));
    CHECK(w2(line, mu, nu) == doctest::Approx(1.0));
  }
}

TEST_CASE("wc basics and metric axioms") {
  Rng rng(6);
  const auto cost = CostSpec::min1();
  CHECK(cost.valid_on_grid());
  CHECK(CostSpec::tanh_cost().valid_on_grid());

  const auto s = testutil::random_euclidean_space(5, 2, rng, true);
  SUBCASE("saturated Diracs") {
    FinitePmmSpace far = testutil::two_point_space(3.0, 0.5, 0.5);
    Eigen::VectorXd mu(2), nu(2);
    mu << 1, 0;
    nu << 0, 1;
    CHECK(wc(far, mu, nu, cost) == doctest::Approx(1.0));
  }
  SUBCASE("symmetry is exact and triangle holds on random triples") {
    for (int t = 0; t < 200; ++t) {
      const auto mu = random_probability(5, rng);
      const auto nu = random_probability(5, rng);
      const auto rho = random_probability(5, rng);
      const double ab = wc(s, mu, nu, cost);
      const double ba = wc(s, nu, mu, cost);
      CHECK(ab == ba);
      CHECK(wc(s, mu, rho, cost) <= ab + wc(s, nu, rho, cost) + 1e-9);
      CHECK(wc(s, mu, nu, cost) <= cost.sup + 1e-12);
    }
  }
  SUBCASE("w2 triangle and identity on random triples") {
    for (int t = 0; t < 200; ++t) {
      const auto mu = random_probability(5, rng);
      const auto nu = random_probability(5, rng);
      const auto rho = random_probability(5, rng);
      CHECK(w2(s, mu, rho) <= w2(s, mu, nu) + w2(s, nu, rho) + 1e-8);
      CHECK(w2(s, mu, nu) == w2(s, nu, mu));
    }
    const auto mu = random_probability(5, rng);
    CHECK(w2(s, mu, mu) < 1e-9);
  }
}

TEST_CASE("optimal value is permutation invariant") {
  Rng rng(8);
  const int n = 5;
  const auto mu = random_probability(n, rng);
  const auto nu = random_probability(n, rng);
  Eigen::MatrixXd cost(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform();
  const double base = optimal_coupling(mu, nu, cost).value;
  const auto perm = testutil::random_permutation(n, rng);
  Eigen::VectorXd mup(n), nup(n);
  Eigen::MatrixXd costp(n, n);
  for (int i = 0; i < n; ++i) {
    mup(i) = mu(perm[i]);
    nup(i) = nu(perm[i]);
    for (int j = 0; j < n; ++j) costp(i, j) = cost(perm[i], perm[j]);
  }
  CHECK(optimal_coupling(mup, nup, costp).value == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("w2 is continuous along mixtures") {
  Rng rng(14);
  const auto s = testutil::random_euclidean_space(6, 2, rng, true);
  const auto mu = random_probability(6, rng);
  const auto nu = random_probability(6, rng);
  double prev = w2(s, mu, nu);
  for (double t : {0.5, 0.25, 0.1, 0.01, 1e-3}) {
    const Eigen::VectorXd mix = (1 - t) * mu + t * nu;
    const double val = w2(s, mix, mu);
    CHECK(val <= prev + 1e-12);
    prev = val;
  }
  CHECK(prev <= 0.1 * w2(s, mu, nu) + 1e-9);
}

TEST_CASE("sinkhorn") {
  Rng rng(15);
  SUBCASE("entropic value decreases to the exact one as eps drops") {
    FinitePmmSpace pair = testutil::two_point_space(1.0, 0.5, 0.5);
    Eigen::VectorXd u = Eigen::VectorXd::Constant(2, 0.5);
    const Eigen::MatrixXd cost = pair.dist.array().square();
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {1.0, 0.1, 0.01}) {
      const auto res = sinkhorn(u, u, cost, eps);
      CHECK(res.value <= prev + 1e-12);
      prev = res.value;
    }
    CHECK(prev <= 1e-2);
  }
  SUBCASE("rounded plan is exactly feasible; value near exact") {
    const int n = 8;
    const auto s = testutil::random_euclidean_space(n, 2, rng, true);
    const auto mu = random_probability(n, rng);
    const auto nu = random_probability(n, rng);
    const Eigen::MatrixXd cost = s.dist.array().square();
    const auto res = sinkhorn(mu, nu, cost, 1e-3);
    CHECK(res.coupling.max_marginal_error() <= 1e-6);
    const double exact = optimal_coupling(mu, nu, cost).value;
    CHECK(std::abs(res.value - exact) <= 1e-2);
    CHECK(res.value >= exact - 1e-9);  // feasible plan upper-bounds the optimum
  }
}

TEST_CASE("tail_second_moment") {
  FinitePmmSpace line;
  line.dist.resize(3, 3);
  line.dist << 0, 1, 2, 1, 0, 1, 2, 1, 0;
  line.mass = Eigen::VectorXd::Constant(3, 1.0 / 3);
  line.base = 0;
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(3, 1.0 / 3);
  CHECK(tail_second_moment(line, mu, 0.5) == doctest::Approx(5.0 / 3.0));
  CHECK(tail_second_moment(line, mu, 2.0) == 0.0);
  Eigen::VectorXd dirac = Eigen::VectorXd::Zero(3);
  dirac(0) = 1.0;
  CHECK(tail_second_moment(line, dirac, 0.0) == 0.0);
  CHECK(tail_second_moment(line, mu, 0.1) >= tail_second_moment(line, mu, 1.5));
}
