// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "reference_selectors.hpp"
#include "test_support.hpp"
#include "tsel/core.hpp"
#include "tsel/error.hpp"
#include "tsel/selection.hpp"

using namespace tsel;

namespace {

// Entries from a coarse grid so that ties are frequent.
SimilarityMatrix tied_similarity(std::size_t m, std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> level(-4, 4);
  Matrix s(m, n);
  for (double& v : s.data()) v = level(rng) / 4.0;
  return SimilarityMatrix(s);
}

// One-dimensional duplicate-pair fixture: two copies at 0, one point at 1, query at 0.5.
struct DuplicateFixture {
  FeatureMatrix pool{{0.0}, {0.0}, {1.0}};
  FeatureMatrix query{{0.5}};
  CostMatrix cost = pairwise_l2(query, pool);
  CostMatrix candidate_cost = pairwise_l2(pool, pool);
};

}  // namespace

TEST_CASE("method tags round trip") {
  for (Method m : {Method::kRoundRobin, Method::kDoublyGreedy, Method::kKnnUniform, Method::kKnnKde,
                   Method::kUot, Method::kBruteForce}) {
    CHECK(parse_method(method_tag(m)) == m);
  }
  CHECK_THROWS_AS(parse_method("greedy"), Error);
}

TEST_CASE("round robin on a hand example") {
  SimilarityMatrix s{{0.9, 0.8, 0.1, 0.0}, {0.9, 0.2, 0.7, 0.3}};
  auto r = select_round_robin(s, 3);
  CHECK(r.indices == std::vector<std::size_t>{0, 2, 1});
  CHECK(r.scores == std::vector<double>{0.9, 0.7, 0.8});
  CHECK(round_robin_order(s) == std::vector<std::size_t>{0, 2, 1, 3});
}

TEST_CASE("doubly greedy on a hand example") {
  SimilarityMatrix s{{0.9, 0.8, 0.1, 0.0}, {0.9, 0.2, 0.7, 0.85}};
  auto r = select_doubly_greedy(s, 3);
  CHECK(r.indices == std::vector<std::size_t>{0, 3, 1});
  CHECK(r.scores == std::vector<double>{0.9, 0.85, 0.8});
}

TEST_CASE("rr and dg agree with naive references on tie-heavy instances") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng() % 4;
    const std::size_t n = 1 + rng() % 12;
    const std::size_t b = rng() % (n + 1);
    auto s = tied_similarity(m, n, rng);
    CAPTURE(trial);
    CHECK(select_round_robin(s, b).indices == testing::reference_round_robin(s, b));
    CHECK(select_doubly_greedy(s, b).indices == testing::reference_doubly_greedy(s, b));
  }
}

TEST_CASE("selections are distinct and sized by the budget") {
  std::mt19937_64 rng(9);
  auto q = testing::random_features(3, 5, rng);
  auto c = testing::random_features(20, 5, rng);
  auto s = pairwise_cosine(q, c);
  auto cost = similarity_to_cost(s, true);
  for (std::size_t b : {0, 1, 7, 20}) {
    for (const auto& r : {select_round_robin(s, b), select_doubly_greedy(s, b),
                          select_knn_uniform(cost, b), select_uot(cost, b)}) {
      CHECK(r.indices.size() == b);
      CHECK(r.scores.size() == b);
      CHECK(std::set<std::size_t>(r.indices.begin(), r.indices.end()).size() == b);
    }
  }
}

TEST_CASE("budget above pool size is rejected") {
  SimilarityMatrix s{{0.1, 0.2}};
  CHECK_THROWS_AS(select_round_robin(s, 3), Error);
  CHECK_THROWS_AS(select_doubly_greedy(s, 3), Error);
}

TEST_CASE("neighborhood size") {
  KnnParams p;
  CHECK(neighborhood_size(p, 10, 4, 100) == 13);   // ceil(5 * 10 / 4)
  CHECK(neighborhood_size(p, 0, 4, 100) == 1);
  CHECK(neighborhood_size(p, 100, 2, 30) == 30);
  p.k = 7;
  CHECK(neighborhood_size(p, 10, 4, 100) == 7);
  p.k = 101;
  CHECK_THROWS_AS(neighborhood_size(p, 10, 4, 100), Error);
  p.k = 0;
  CHECK_THROWS_AS(neighborhood_size(p, 10, 4, 100), Error);
}

TEST_CASE("knn uniform mass sums to one and sits on nearest neighbours") {
  CostMatrix cost{{0.1, 0.5, 0.2, 0.9}, {0.8, 0.1, 0.7, 0.05}};
  KnnParams p;
  p.k = 2;
  auto mass = knn_uniform_mass(cost, p, 2);
  CHECK(std::accumulate(mass.begin(), mass.end(), 0.0) == doctest::Approx(1.0));
  CHECK(mass == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  p.k = 1;
  auto one = knn_uniform_mass(cost, p, 1);
  CHECK(one == std::vector<double>{0.5, 0.0, 0.0, 0.5});
  CHECK(positive_mass_count(one) == 2);
  auto r = select_knn_uniform(cost, 2, p);
  CHECK(r.indices == std::vector<std::size_t>{0, 3});
}

TEST_CASE("K larger than the prefetch size is rejected") {
  CostMatrix cost{{0.1, 0.5, 0.2, 0.9}};
  KnnParams p;
  p.k = 3;
  p.prefetch = 2;
  CHECK_THROWS_AS(knn_uniform_mass(cost, p, 1), Error);
}

TEST_CASE("kde density on the duplicate fixture") {
  DuplicateFixture f;
  KnnParams p;
  auto dens = kde_density(f.candidate_cost, p);
  const double e = std::exp(-1.0 / (2.0 * 0.75 * 0.75));
  CHECK(dens[0] == doctest::Approx((2.0 + e) / 3.0));
  CHECK(dens[1] == doctest::Approx((2.0 + e) / 3.0));
  CHECK(dens[2] == doctest::Approx((1.0 + 2.0 * e) / 3.0));
}

TEST_CASE("kde mass suppresses duplicates") {
  DuplicateFixture f;
  KnnParams p;
  auto mass = knn_kde_mass(f.cost, f.candidate_cost, p, 2);
  const double e = std::exp(-1.0 / (2.0 * 0.75 * 0.75));
  const double inv0 = 3.0 / (2.0 + e), inv2 = 3.0 / (1.0 + 2.0 * e);
  const double norm = 2.0 * inv0 + inv2;
  CHECK(mass[0] == doctest::Approx(inv0 / norm));
  CHECK(mass[2] == doctest::Approx(inv2 / norm));
  CHECK(mass[0] < mass[2]);
  CHECK(std::accumulate(mass.begin(), mass.end(), 0.0) == doctest::Approx(1.0));
  auto r = select_knn_kde(f.cost, f.candidate_cost, 1, p);
  CHECK(r.indices == std::vector<std::size_t>{2});

  // Uniform weighting cannot tell the three apart and falls back to index order.
  auto u = select_knn_uniform(f.cost, 1, p);
  CHECK(u.indices == std::vector<std::size_t>{0});
}

TEST_CASE("kde with huge bandwidth reduces to knn uniform") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto q = testing::random_features(3, 4, rng);
    auto c = testing::random_features(25, 4, rng);
    auto cost = pairwise_l2(q, c);
    auto cc = pairwise_l2(c, c);
    KnnParams p;
    p.sigma = 1e12;
    p.k_kde = 10;
    for (std::size_t b : {1, 3, 8}) {
      CHECK(select_knn_kde(cost, cc, b, p).indices == select_knn_uniform(cost, b, p).indices);
    }
  }
}

TEST_CASE("kde rejects bad inputs") {
  DuplicateFixture f;
  KnnParams p;
  p.sigma = 0.0;
  CHECK_THROWS_AS(kde_density(f.candidate_cost, p), Error);
  CostMatrix nonzero_diag{{0.5, 1.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(kde_density(nonzero_diag, KnnParams{}), Error);
  CostMatrix rect{{0.0, 1.0}};
  CHECK_THROWS_AS(kde_density(rect, KnnParams{}), Error);
}

TEST_CASE("uot keeps the query marginal and picks near candidates") {
  CostMatrix cost{{0.0, 0.9, 0.9, 0.05}, {0.9, 0.9, 0.1, 0.9}};
  auto plan = uot_plan(cost, UotParams{});
  CHECK(plan.converged);
  for (double r : plan.row_marginal()) CHECK(r == doctest::Approx(0.5).epsilon(1e-7));
  auto sel = select_uot(cost, 2, UotParams{});
  CHECK(std::set<std::size_t>(sel.indices.begin(), sel.indices.end()) == std::set<std::size_t>{0, 2});
  CHECK(sel.scores[0] >= sel.scores[1]);
}

TEST_CASE("uot requires normalized costs and reports non-convergence") {
  CostMatrix big{{0.0, 2.0}};
  CHECK_THROWS_AS(select_uot(big, 1), Error);
  std::mt19937_64 rng(2);
  Matrix c = testing::random_matrix(4, 6, rng, 0.0, 1.0);
  UotParams p;
  p.max_iter = 1;
  CHECK_THROWS_AS(select_uot(CostMatrix(c), 1, p), NotConverged);
}

TEST_CASE("top by score breaks ties toward the smaller index") {
  std::vector<double> s{0.5, 0.9, 0.5, 0.9, 0.1};
  CHECK(top_by_score(s, 4) == std::vector<std::size_t>{1, 3, 0, 2});
}

TEST_CASE("round robin and doubly greedy worked examples") {
  SimilarityMatrix s{{0.9, 0.1, 0.5, 0.2}, {0.8, 0.7, 0.3, 0.6}};
  CHECK(select_round_robin(s, 2).indices == std::vector<std::size_t>{0, 1});
  CHECK(select_round_robin(s, 4).indices == std::vector<std::size_t>{0, 1, 2, 3});

  SimilarityMatrix t{{0.9, 0.8, 0.1}, {0.85, 0.05, 0.2}};
  auto dg = select_doubly_greedy(t, 2);
  CHECK(dg.indices == std::vector<std::size_t>{0, 1});
  CHECK(dg.scores == std::vector<double>{0.9, 0.8});
  CHECK(select_doubly_greedy(t, 3).scores == std::vector<double>{0.9, 0.8, 0.2});
  auto rr = select_round_robin(t, 2);
  CHECK(std::set<std::size_t>(rr.indices.begin(), rr.indices.end()) == std::set<std::size_t>{0, 2});
}

TEST_CASE("knn worked examples") {
  CostMatrix distinct{{0.1, 0.5, 0.9}, {0.8, 0.7, 0.05}};
  KnnParams one;
  one.k = 1;
  auto r = select_knn_uniform(distinct, 2, one);
  CHECK(std::set<std::size_t>(r.indices.begin(), r.indices.end()) == std::set<std::size_t>{0, 2});

  KnnParams all;
  all.k = 3;
  CHECK(select_knn_uniform(distinct, 2, all).indices == std::vector<std::size_t>{0, 1});

  CostMatrix single{{0.1, 0.2, 0.9}};
  KnnParams two;
  two.k = 2;
  CHECK(select_knn_uniform(single, 2, two).indices == std::vector<std::size_t>{0, 1});
}

TEST_CASE("kde on equidistant candidates equals knn uniform") {
  CostMatrix cc{{0, 1, 1, 1}, {1, 0, 1, 1}, {1, 1, 0, 1}, {1, 1, 1, 0}};
  CostMatrix cost{{0.2, 0.4, 0.1, 0.9}, {0.5, 0.3, 0.6, 0.2}};
  KnnParams p;
  p.k = 2;
  auto kde = knn_kde_mass(cost, cc, p, 2);
  auto uni = knn_uniform_mass(cost, p, 2);
  for (std::size_t i = 0; i < 4; ++i) CHECK(kde[i] == doctest::Approx(uni[i]).epsilon(1e-12));
}

TEST_CASE("kde on the duplicate fixture keeps one duplicate at budget two") {
  DuplicateFixture f;
  KnnParams p;
  p.k = 3;
  auto r = select_knn_kde(f.cost, f.candidate_cost, 2, p);
  CHECK(r.indices == std::vector<std::size_t>{2, 0});
}

TEST_CASE("uot worked examples") {
  CostMatrix flat{{0.3, 0.3, 0.3, 0.3}, {0.3, 0.3, 0.3, 0.3}};
  CHECK(select_uot(flat, 2).indices == std::vector<std::size_t>{0, 1});

  CostMatrix outlier{{0.01, 0.0, 0.02, 1.0}, {0.0, 0.02, 0.01, 0.99}};
  auto plan = uot_plan(outlier, UotParams{});
  auto mass = plan.col_marginal();
  CHECK(mass[3] < 1e-6);
  auto order = select_uot(outlier, 4).indices;
  CHECK(order.back() == 3);
}
