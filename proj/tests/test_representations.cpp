// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "test_support.hpp"
#include "tsel/kernels.hpp"
#include "tsel/representations.hpp"

using namespace tsel;

TEST_CASE("position weights sum to one and increase") {
  for (std::size_t L = 1; L <= 100; ++L) {
    auto w = position_weights(L);
    REQUIRE(w.size() == L);
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < L; ++i) CHECK(w[i] > w[i - 1]);
  }
  auto w3 = position_weights(3);
  CHECK(w3[0] == doctest::Approx(1.0 / 6.0));
  CHECK(w3[2] == doctest::Approx(0.5));
  CHECK_THROWS(position_weights(0));
}

TEST_CASE("position weighted pool") {
  Matrix h{{1, 0}, {0, 1}, {3, 3}};
  auto pooled = position_weighted_pool(h);
  CHECK(pooled[0] == doctest::Approx(1.0 / 6.0 + 1.5));
  CHECK(pooled[1] == doctest::Approx(2.0 / 6.0 + 1.5));
  Matrix constant{{2, -1}, {2, -1}, {2, -1}, {2, -1}};
  auto c = position_weighted_pool(constant);
  CHECK(c[0] == doctest::Approx(2.0));
  CHECK(c[1] == doctest::Approx(-1.0));
}

TEST_CASE("adam update matches frozen values") {
  AdamHyper zero{0.0, 0.0, 1e-8};
  AdamState s{{0.0, 0.0}, {0.0, 0.0}, 0};
  std::vector<double> g{2.0, -3.0};
  auto out = adam_update(g, s, zero);
  CHECK(std::abs(out[0] - 0.999999995) < 1e-12);
  CHECK(std::abs(out[1] - (-0.9999999966666667)) < 1e-12);

  AdamState fresh{{0.0}, {0.0}, 0};
  std::vector<double> one{1.0};
  auto d = adam_update(one, fresh, AdamHyper{});
  CHECK(std::abs(d[0] - 1.0 / (1.0 + 1e-8)) < 1e-12);
}

TEST_CASE("adam update with history") {
  AdamHyper h{};
  AdamState s{{0.2}, {0.05}, 3};
  std::vector<double> g{0.4};
  double m = 0.9 * 0.2 + 0.1 * 0.4;
  double v = 0.999 * 0.05 + 0.001 * 0.16;
  double mh = m / (1 - std::pow(0.9, 4));
  double vh = v / (1 - std::pow(0.999, 4));
  auto out = adam_update(g, s, h);
  CHECK(out[0] == doctest::Approx(mh / (std::sqrt(vh) + 1e-8)).epsilon(1e-13));
}

TEST_CASE("adam rejects mismatched state") {
  AdamState s{{0.0}, {0.0, 0.0}, 0};
  std::vector<double> g{1.0, 2.0};
  CHECK_THROWS(adam_update(g, s, AdamHyper{}));
}

TEST_CASE("projection is linear and deterministic") {
  std::mt19937_64 rng(4);
  std::vector<double> a(300), b(300);
  for (auto& v : a) v = std::normal_distribution<double>()(rng);
  for (auto& v : b) v = std::normal_distribution<double>()(rng);
  ProjectionSpec spec{99, 300, 256};
  auto pa = rademacher_project(a, spec);
  auto pb = rademacher_project(b, spec);
  std::vector<double> sum(300);
  for (std::size_t i = 0; i < 300; ++i) sum[i] = a[i] + b[i];
  auto ps = rademacher_project(sum, spec);
  for (std::size_t k = 0; k < 256; ++k) CHECK(ps[k] == doctest::Approx(pa[k] + pb[k]).epsilon(1e-12));
  CHECK(rademacher_project(a, spec) == pa);
  ProjectionSpec other{100, 300, 256};
  CHECK(rademacher_project(a, other) != pa);
  CHECK(projection_entry(spec, 7, 11) == kernels::rademacher_sign(99, 7, 11));
}

TEST_CASE("projection roughly preserves norms") {
  std::mt19937_64 rng(12);
  std::vector<double> x(500);
  for (auto& v : x) v = std::normal_distribution<double>()(rng);
  ProjectionSpec spec{1, 500, 4096};
  auto p = rademacher_project(x, spec);
  double nx = 0, np = 0;
  for (double v : x) nx += v * v;
  for (double v : p) np += v * v;
  // unscaled: E||Pi^T x||^2 = d ||x||^2
  CHECK(np / (4096.0 * nx) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("row projection validates dimension") {
  FeatureMatrix x{{1, 2, 3}};
  CHECK_THROWS(rademacher_project_rows(x, ProjectionSpec{0, 4, 8}));
  auto p = rademacher_project_rows(x, ProjectionSpec{0, 3, 8});
  CHECK(p.dims() == 8);
}

TEST_CASE("small worked examples") {
  Matrix one{{0.3, -0.7}};
  CHECK(position_weighted_pool(one) == std::vector<double>{0.3, -0.7});
  Matrix two{{1, 0}, {0, 1}};
  auto p2 = position_weighted_pool(two);
  CHECK(p2[0] == doctest::Approx(1.0 / 3.0));
  CHECK(p2[1] == doctest::Approx(2.0 / 3.0));
  Matrix eye{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  auto p3 = position_weighted_pool(eye);
  CHECK(p3[0] == doctest::Approx(1.0 / 6.0));
  CHECK(p3[1] == doctest::Approx(2.0 / 6.0));
  CHECK(p3[2] == doctest::Approx(3.0 / 6.0));

  AdamState zero{{0.0, 0.0}, {0.0, 0.0}, 4};
  std::vector<double> g0{0.0, 0.0};
  CHECK(adam_update(g0, zero, AdamHyper{}) == std::vector<double>{0.0, 0.0});

  std::vector<double> x0(50, 0.0);
  auto p = rademacher_project(x0, ProjectionSpec{3, 50, 64});
  CHECK(p == std::vector<double>(64, 0.0));
}
