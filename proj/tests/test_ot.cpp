// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"
#include "tsel/core.hpp"
#include "tsel/error.hpp"
#include "tsel/ot.hpp"

using namespace tsel;
using namespace tsel::ot;

namespace {

CostMatrix random_cost(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  return CostMatrix(testing::random_matrix(m, n, rng, 0.0, 1.0));
}

// For equal-size uniform sets the optimal plan is a permutation (Birkhoff).
double permutation_w1(const FeatureMatrix& x, const FeatureMatrix& y) {
  const std::size_t n = x.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = INFINITY;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < x.dims(); ++k) {
        const double d = x(i, k) - y(perm[i], k);
        d2 += d * d;
      }
      total += std::sqrt(d2);
    }
    best = std::min(best, total / static_cast<double>(n));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("discrete measures") {
  auto u = DiscreteMeasure::uniform(4);
  CHECK(u.total() == doctest::Approx(1.0));
  CHECK(u.is_probability());
  DiscreteMeasure w({0.2, 0.2});
  CHECK_FALSE(w.is_probability());
  CHECK_THROWS_AS(DiscreteMeasure({0.5, -0.1}), Error);
  CHECK_THROWS_AS(DiscreteMeasure::uniform(0), Error);
}

TEST_CASE("balanced sinkhorn matches both marginals") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    auto c = random_cost(6, 9, rng);
    DiscreteMeasure mu({0.1, 0.2, 0.3, 0.1, 0.2, 0.1});
    auto plan = sinkhorn(c, mu, DiscreteMeasure::uniform(9), SinkhornOptions{0.05, 1e-10, 20000});
    REQUIRE(plan.converged);
    auto rows = plan.row_marginal();
    auto cols = plan.col_marginal();
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(rows[j] - mu[j]) < 1e-9);
    for (double v : cols) CHECK(std::abs(v - 1.0 / 9.0) < 1e-9);
    CHECK(plan.total_mass() == doctest::Approx(1.0));
    for (double v : plan.values.data()) CHECK(v >= 0.0);
  }
}

TEST_CASE("balanced sinkhorn rejects non-probability marginals") {
  CostMatrix c{{0.0, 1.0}};
  CHECK_THROWS_AS(sinkhorn(c, DiscreteMeasure({0.5}), DiscreteMeasure::uniform(2)), Error);
  CHECK_THROWS_AS(sinkhorn(c, DiscreteMeasure::uniform(2), DiscreteMeasure::uniform(2)), Error);
}

TEST_CASE("sinkhorn reports non-convergence without throwing") {
  std::mt19937_64 rng(3);
  auto c = random_cost(5, 5, rng);
  auto plan = sinkhorn(c, DiscreteMeasure::uniform(5), DiscreteMeasure::uniform(5),
                       SinkhornOptions{0.001, 1e-14, 2});
  CHECK_FALSE(plan.converged);
  CHECK(plan.iterations == 2);
}

TEST_CASE("small epsilon sinkhorn approaches the exact cost from above") {
  FeatureMatrix x{{0, 0}, {4, 0}, {0, 3}};
  FeatureMatrix y{{1, 0}, {0, 1}, {2, 2}};
  const double exact = exact_w1(x, y);
  // Square uniform problems converge slowly at small epsilon; the cost settles long before the residual.
  Matrix c(3, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      c(i, j) = std::hypot(x(i, 0) - y(j, 0), x(i, 1) - y(j, 1));
    }
  }
  CostMatrix cost(c);
  auto plan = sinkhorn(cost, DiscreteMeasure::uniform(3), DiscreteMeasure::uniform(3),
                       SinkhornOptions{0.01, 1e-9, 20000});
  CHECK(plan.row_residual < 1e-4);
  const double ent = plan.transport_cost(cost);
  CHECK(ent >= exact - 1e-4);
  CHECK(ent - exact < 0.1);
}

TEST_CASE("unbalanced sinkhorn with hard first marginal") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    auto c = random_cost(4, 12, rng);
    auto plan = sinkhorn_unbalanced(c, DiscreteMeasure::uniform(4), DiscreteMeasure::uniform(12));
    REQUIRE(plan.converged);
    for (double r : plan.row_marginal()) CHECK(std::abs(r - 0.25) <= 1e-7);
  }
}

TEST_CASE("unbalanced sinkhorn with large tau matches balanced") {
  std::mt19937_64 rng(5);
  auto c = random_cost(7, 7, rng);
  auto mu = DiscreteMeasure::uniform(7);
  auto b = sinkhorn(c, mu, mu, SinkhornOptions{0.01, 1e-7, 100000});
  auto u = sinkhorn_unbalanced(c, mu, mu, UnbalancedOptions{0.01, 1e6, 1e6, 1e-7, 100000});
  CHECK(std::max(b.row_residual, u.row_residual) < 1e-6);
  for (std::size_t k = 0; k < b.values.size(); ++k) {
    CHECK(std::abs(b.values.data()[k] - u.values.data()[k]) < 1e-4);
  }
}

TEST_CASE("unbalanced sinkhorn with tiny tau drops far mass") {
  CostMatrix c{{0.0, 1.0}};
  auto plan = sinkhorn_unbalanced(c, DiscreteMeasure({1.0}), DiscreteMeasure({0.5, 0.5}));
  REQUIRE(plan.converged);
  CHECK(plan.values(0, 0) > 0.99);
  CHECK(plan.values(0, 1) < 1e-6);
}

TEST_CASE("unbalanced sinkhorn validates options") {
  CostMatrix c{{0.0, 1.0}};
  auto mu = DiscreteMeasure({1.0});
  auto nu = DiscreteMeasure({0.5, 0.5});
  CHECK_THROWS_AS(sinkhorn_unbalanced(c, mu, nu, UnbalancedOptions{0.0}), Error);
  CHECK_THROWS_AS(sinkhorn_unbalanced(c, mu, nu, UnbalancedOptions{0.01, 1.0, -1.0}), Error);
  CHECK_THROWS_AS(sinkhorn_unbalanced(c, nu, nu), Error);
}

TEST_CASE("exact W1 frozen values") {
  FeatureMatrix a{{0.0}, {2.0}};
  FeatureMatrix b{{1.0}};
  CHECK(exact_w1(a, b) == doctest::Approx(1.0).epsilon(1e-12));

  FeatureMatrix x{{0, 0}, {1, 0}, {0, 2}, {3, 1}};
  FeatureMatrix y{{1, 1}, {2, 2}, {0, 1}};
  DiscreteMeasure wx({0.1, 0.2, 0.3, 0.4});
  DiscreteMeasure wy({0.5, 0.25, 0.25});
  CHECK(exact_w1(x, y, wx, wy) == doctest::Approx(1.315685424949238).epsilon(1e-9));

  FeatureMatrix p{{0, 0}, {4, 0}, {0, 3}};
  FeatureMatrix q{{1, 0}, {0, 1}, {2, 2}};
  CHECK(exact_w1(p, q) == doctest::Approx(1.942809041582063).epsilon(1e-9));
}

TEST_CASE("exact W1 matches permutation enumeration") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    const std::size_t d = 1 + rng() % 3;
    auto x = testing::random_features(n, d, rng);
    auto y = testing::random_features(n, d, rng);
    CAPTURE(trial);
    CHECK(exact_w1(x, y) == doctest::Approx(permutation_w1(x, y)).epsilon(1e-8));
  }
}

TEST_CASE("exact W1 is a metric on random instances") {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 20; ++trial) {
    auto x = testing::random_features(5, 2, rng);
    auto y = testing::random_features(7, 2, rng);
    auto z = testing::random_features(4, 2, rng);
    const double xy = exact_w1(x, y), yx = exact_w1(y, x);
    CHECK(xy == doctest::Approx(yx).epsilon(1e-9));
    CHECK(exact_w1(x, x) == doctest::Approx(0.0));
    CHECK(exact_w1(x, z) <= xy + exact_w1(y, z) + 1e-9);
  }
}

TEST_CASE("exact transport plan is feasible") {
  Matrix cost{{1.0, 2.0, 0.5}, {0.3, 0.1, 4.0}};
  std::vector<double> supply{0.6, 0.4}, demand{0.2, 0.3, 0.5};
  auto t = exact_transport(cost, supply, demand);
  auto rs = t.flow.row_sums();
  auto cs = t.flow.col_sums();
  for (std::size_t i = 0; i < 2; ++i) CHECK(rs[i] == doctest::Approx(supply[i]));
  for (std::size_t j = 0; j < 3; ++j) CHECK(cs[j] == doctest::Approx(demand[j]));
  // row 0 ships 0.5 at 0.5 and 0.1 elsewhere; row 1 covers col 0 and col 1 cheaply
  CHECK(t.cost == doctest::Approx(0.5 * 0.5 + 0.1 * 1.0 + 0.1 * 0.3 + 0.3 * 0.1));
}

TEST_CASE("exact transport ignores zero-weight nodes") {
  Matrix cost{{1.0, 5.0}, {7.0, 2.0}};
  std::vector<double> supply{1.0, 0.0}, demand{0.0, 1.0};
  auto t = exact_transport(cost, supply, demand);
  CHECK(t.cost == doctest::Approx(5.0));
  CHECK(t.flow(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("exact transport rejects unequal totals") {
  Matrix cost{{1.0}};
  std::vector<double> s{1.0}, d{0.5};
  CHECK_THROWS_AS(exact_transport(cost, s, d), Error);
}

TEST_CASE("exact W1 enforces the size cap") {
  std::mt19937_64 rng(1);
  auto x = testing::random_features(20, 2, rng);
  auto y = testing::random_features(20, 2, rng);
  try {
    (void)exact_w1(x, y, 10);
    FAIL("cap not enforced");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kCapExceeded);
  }
  CHECK(exact_w1(x, y, 20) > 0.0);
}

TEST_CASE("entropic W1 throws when sinkhorn does not converge") {
  FeatureMatrix x{{0.0}, {1.0}};
  FeatureMatrix y{{0.5}, {3.0}};
  CHECK_THROWS_AS(entropic_w1(x, y, DiscreteMeasure::uniform(2), DiscreteMeasure::uniform(2),
                              SinkhornOptions{0.001, 1e-15, 1}),
                  NotConverged);
}

TEST_CASE("sinkhorn worked examples") {
  auto mu = DiscreteMeasure({0.3, 0.7});
  auto nu = DiscreteMeasure({0.2, 0.5, 0.3});
  auto zero = sinkhorn(CostMatrix(Matrix(2, 3, 0.0)), mu, nu);
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t i = 0; i < 3; ++i) CHECK(zero.values(j, i) == doctest::Approx(mu[j] * nu[i]).epsilon(1e-9));
  }

  CostMatrix swap{{0.0, 1.0}, {1.0, 0.0}};
  auto u2 = DiscreteMeasure::uniform(2);
  auto diag = sinkhorn(swap, u2, u2);
  CHECK(diag.values(0, 0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(diag.values(1, 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(diag.transport_cost(swap) <= 0.02);

  // first-order deviation from the product is about mu_j nu_i * spread(C) / eps
  std::mt19937_64 rng(17);
  CostMatrix c(testing::random_matrix(3, 4, rng, 0.0, 0.1));
  auto wide = sinkhorn(c, DiscreteMeasure::uniform(3), DiscreteMeasure::uniform(4), SinkhornOptions{10.0});
  for (double v : wide.values.data()) CHECK(std::abs(v - 1.0 / 12.0) < 1e-3);
}

TEST_CASE("outlier mass shrinks as the candidate penalty weakens") {
  // last candidate is an outlier for every query
  CostMatrix c{{0.05, 0.1, 1.0}, {0.1, 0.05, 1.0}};
  auto mu = DiscreteMeasure::uniform(2);
  auto nu = DiscreteMeasure::uniform(3);
  double previous = INFINITY;
  for (double tau2 : {1.0, 0.1, 0.01, 1e-3, 1e-4}) {
    auto plan = sinkhorn_unbalanced(c, mu, nu, UnbalancedOptions{0.01, kInfinity, tau2, 1e-9, 100000});
    REQUIRE(plan.converged);
    const double outlier = plan.col_marginal()[2];
    CHECK(outlier < previous);
    previous = outlier;
  }
  CHECK(previous < 1e-6);
}

TEST_CASE("exact W1 worked examples and homogeneity") {
  FeatureMatrix p{{0, 0}};
  FeatureMatrix q{{3, 4}};
  CHECK(exact_w1(p, q) == doctest::Approx(5.0));
  FeatureMatrix x{{0, 0}, {1, 0}, {0, 2}, {3, 1}};
  DiscreteMeasure wx({0.1, 0.2, 0.3, 0.4});
  CHECK(exact_w1(x, x, wx, wx) == doctest::Approx(0.0));

  std::mt19937_64 rng(90);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = testing::random_features(6, 3, rng);
    auto b = testing::random_features(4, 3, rng);
    const double scale = trial % 2 ? -2.5 : 0.4;
    Matrix sa = a.values(), sb = b.values();
    for (double& v : sa.data()) v = scale * v + 1.5;
    for (double& v : sb.data()) v = scale * v + 1.5;
    CHECK(exact_w1(FeatureMatrix(sa), FeatureMatrix(sb)) ==
          doctest::Approx(std::abs(scale) * exact_w1(a, b)).epsilon(1e-8));
  }
}
