// SPDX-License-Identifier: Apache-2.0
#pragma once

// Monte-Carlo checks of how fast a random with-replacement subset's empirical
// measure approaches the pool's in W1, and of the concentration term around
// that mean.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tsel/matrix.hpp"
#include "tsel/ot.hpp"
#include "tsel/selection.hpp"

namespace tsel::theory {

enum class PoolDistribution { kUniformCube, kGaussianClipped };

std::string_view distribution_tag(PoolDistribution dist);
PoolDistribution parse_distribution(std::string_view tag);

struct SyntheticPoolSpec {
  std::size_t n = 512;
  std::size_t d = 3;        // >= 3
  double diameter = 1.0;    // every pair of generated points is within this distance
  PoolDistribution distribution = PoolDistribution::kUniformCube;
  std::uint64_t seed = 7;
};

/// Uniform cube of side diameter / sqrt(d), or a Gaussian rejected outside the
/// ball of radius diameter / 2. diameter == 0 gives n identical points.
FeatureMatrix generate_pool(const SyntheticPoolSpec& spec);

/// B indices drawn i.i.d. uniformly with replacement.
std::vector<std::size_t> sample_random_multiset(const FeatureMatrix& pool, std::size_t budget,
                                                std::uint64_t seed);

/// Empirical measure of a multiset of pool rows: distinct rows with count / B weights.
struct WeightedSupport {
  FeatureMatrix points;
  ot::DiscreteMeasure weights;
};
WeightedSupport empirical_support(const FeatureMatrix& pool, std::span<const std::size_t> multiset);

/// W1 between a with-replacement multiset's empirical measure and the full pool.
double random_subset_w1(const FeatureMatrix& pool, std::span<const std::size_t> multiset,
                        std::size_t cap = ot::kDefaultOracleCap);

struct DecayReport {
  std::vector<std::size_t> budgets;
  std::vector<double> mean_w1;
  std::vector<double> stderr_w1;
  std::optional<double> loglog_slope;  // empty when degenerate
  bool degenerate = false;             // some mean W1 is 0, slope undefined
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// For each budget, mean W1 over `trials` random multisets (trial seed = seed + t).
DecayReport empirical_w1_decay(const FeatureMatrix& pool, std::span<const std::size_t> budgets,
                               std::size_t trials, std::uint64_t seed);
DecayReport empirical_w1_decay(const SyntheticPoolSpec& spec, std::span<const std::size_t> budgets,
                               std::size_t trials);

struct CoverageReport {
  double coverage = 0.0;   // fraction of trials with W1 <= mean + slack
  double mean_w1 = 0.0;
  double slack = 0.0;      // diameter * sqrt(log(1/delta) / (2B))
  std::size_t budget = 0;
  std::size_t trials = 0;
  double delta = 0.0;
};

/// Bounded-differences deviation for a B-point empirical measure in a set of the given diameter.
double mcdiarmid_slack(double diameter, std::size_t budget, double delta);

CoverageReport mcdiarmid_coverage(const SyntheticPoolSpec& spec, std::size_t budget,
                                  std::size_t trials, double delta);

inline constexpr std::uint64_t kEnumerationGuard = 1'000'000;

/// n choose k, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Exhaustive argmin over size-B subsets of W1(uniform on subset, uniform on query);
/// ties go to the lexicographically smallest index set. Every score is the optimal W1.
SelectionResult brute_force_min_w1_subset(const FeatureMatrix& pool, const FeatureMatrix& query,
                                          std::size_t budget);

/// Numerical check of the two triangle inequalities behind the random-subset bound:
///   W1(rnd, star) <= W1(rnd, Q) + W1(star, Q)
///   W1(rnd, Q)    <= W1(rnd, D) + W1(D, Q)
struct DecompositionReport {
  double rnd_star = 0.0;
  double rnd_query = 0.0;
  double star_query = 0.0;
  double rnd_pool = 0.0;
  double pool_query = 0.0;
  double slack_first = 0.0;   // rhs - lhs of the first inequality
  double slack_second = 0.0;
  bool holds = false;         // both slacks >= -1e-9
};

DecompositionReport decomposition_check(const FeatureMatrix& pool, const FeatureMatrix& query,
                                        std::span<const std::size_t> random_multiset,
                                        std::span<const std::size_t> star_subset,
                                        std::size_t cap = ot::kDefaultOracleCap);

}  // namespace tsel::theory
