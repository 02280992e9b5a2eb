// SPDX-License-Identifier: Apache-2.0

#include "tsel/theoryval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "tsel/core.hpp"
#include "tsel/error.hpp"

namespace tsel::theory {

namespace {

using Index = std::int64_t;

constexpr std::uint64_t kPoolSalt = 0x9E3779B97F4A7C15ULL;

double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stderr_of(std::span<const double> xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

// W1 of `trials` random multisets of size `budget` against the whole pool; trial t uses seed + t.
std::vector<double> random_trials(const FeatureMatrix& pool, std::size_t budget, std::size_t trials,
                                  std::uint64_t seed) {
  std::vector<double> w(trials);
  const Index count = static_cast<Index>(trials);
#pragma omp parallel for schedule(dynamic)
  for (Index t = 0; t < count; ++t) {
    const auto sample = sample_random_multiset(pool, budget, seed + static_cast<std::uint64_t>(t));
    w[static_cast<std::size_t>(t)] = random_subset_w1(pool, sample);
  }
  return w;
}

}  // namespace

std::string_view distribution_tag(PoolDistribution dist) {
  switch (dist) {
    case PoolDistribution::kUniformCube: return "uniform-cube";
    case PoolDistribution::kGaussianClipped: return "gaussian-clipped";
  }
  return "unknown";
}

PoolDistribution parse_distribution(std::string_view tag) {
  if (tag == "uniform-cube") return PoolDistribution::kUniformCube;
  if (tag == "gaussian-clipped") return PoolDistribution::kGaussianClipped;
  throw Error(ErrorCode::kInvalidArgument, "unknown distribution '" + std::string(tag) + "'");
}

FeatureMatrix generate_pool(const SyntheticPoolSpec& spec) {
  if (spec.n == 0) throw Error(ErrorCode::kInvalidArgument, "pool size must be >= 1");
  if (spec.d < 3) throw Error(ErrorCode::kInvalidArgument, "synthetic pools need d >= 3");
  if (!(spec.diameter >= 0.0) || !std::isfinite(spec.diameter)) {
    throw Error(ErrorCode::kInvalidArgument, "diameter must be finite and >= 0");
  }
  Matrix points(spec.n, spec.d);
  if (spec.diameter == 0.0) return FeatureMatrix(std::move(points));

  std::mt19937_64 rng(spec.seed ^ kPoolSalt);
  const double dims = static_cast<double>(spec.d);
  switch (spec.distribution) {
    case PoolDistribution::kUniformCube: {
      std::uniform_real_distribution<double> coord(0.0, spec.diameter / std::sqrt(dims));
      for (double& v : points.data()) v = coord(rng);
      break;
    }
    case PoolDistribution::kGaussianClipped: {
      const double radius = spec.diameter / 2.0;
      std::normal_distribution<double> coord(0.0, radius / (2.0 * std::sqrt(dims)));
      for (std::size_t r = 0; r < spec.n; ++r) {
        auto row = points.row(r);
        double norm = 0.0;
        do {
          norm = 0.0;
          for (double& v : row) {
            v = coord(rng);
            norm += v * v;
          }
        } while (std::sqrt(norm) > radius);
      }
      break;
    }
  }
  return FeatureMatrix(std::move(points));
}

std::vector<std::size_t> sample_random_multiset(const FeatureMatrix& pool, std::size_t budget,
                                                std::uint64_t seed) {
  if (budget == 0) throw Error(ErrorCode::kInvalidArgument, "budget must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, pool.rows() - 1);
  std::vector<std::size_t> out(budget);
  for (auto& i : out) i = pick(rng);
  return out;
}

WeightedSupport empirical_support(const FeatureMatrix& pool, std::span<const std::size_t> multiset) {
  if (multiset.empty()) throw Error(ErrorCode::kInvalidArgument, "empty multiset");
  std::map<std::size_t, std::size_t> counts;
  for (auto i : multiset) ++counts[i];
  std::vector<std::size_t> rows;
  std::vector<double> weights;
  const double total = static_cast<double>(multiset.size());
  for (const auto& [index, count] : counts) {
    rows.push_back(index);
    weights.push_back(static_cast<double>(count) / total);
  }
  return {pool.select_rows(rows), ot::DiscreteMeasure(std::move(weights))};
}

double random_subset_w1(const FeatureMatrix& pool, std::span<const std::size_t> multiset,
                        std::size_t cap) {
  const auto support = empirical_support(pool, multiset);
  return ot::exact_w1(support.points, pool, support.weights, ot::DiscreteMeasure::uniform(pool.rows()), cap);
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "slope fit needs at least two paired points");
  }
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!(xs[k] > 0.0) || !(ys[k] > 0.0)) {
      throw Error(ErrorCode::kDegenerateInput, "log-log fit needs positive values");
    }
    lx.push_back(std::log(xs[k]));
    ly.push_back(std::log(ys[k]));
  }
  const double mx = mean_of(lx), my = mean_of(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  if (sxx == 0.0) throw Error(ErrorCode::kDegenerateInput, "log-log fit needs distinct x values");
  return sxy / sxx;
}

DecayReport empirical_w1_decay(const FeatureMatrix& pool, std::span<const std::size_t> budgets,
                               std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  if (budgets.empty()) throw Error(ErrorCode::kInvalidArgument, "no budgets given");
  for (std::size_t k = 0; k < budgets.size(); ++k) {
    if (budgets[k] == 0 || (k > 0 && budgets[k] <= budgets[k - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "budgets must be positive and strictly increasing");
    }
  }
  DecayReport report;
  report.budgets.assign(budgets.begin(), budgets.end());
  report.trials = trials;
  report.seed = seed;
  for (auto b : budgets) {
    const auto w = random_trials(pool, b, trials, seed);
    const double mean = mean_of(w);
    report.mean_w1.push_back(mean);
    report.stderr_w1.push_back(stderr_of(w, mean));
  }
  report.degenerate = budgets.size() < 2 ||
                      std::ranges::any_of(report.mean_w1, [](double m) { return !(m > 0.0); });
  if (!report.degenerate) {
    std::vector<double> xs(budgets.begin(), budgets.end());
    for (auto& x : xs) x = static_cast<double>(x);
    report.loglog_slope = loglog_slope(xs, report.mean_w1);
  }
  return report;
}

DecayReport empirical_w1_decay(const SyntheticPoolSpec& spec, std::span<const std::size_t> budgets,
                               std::size_t trials) {
  return empirical_w1_decay(generate_pool(spec), budgets, trials, spec.seed);
}

double mcdiarmid_slack(double diameter, std::size_t budget, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "delta must be in (0, 1]");
  if (budget == 0) throw Error(ErrorCode::kInvalidArgument, "budget must be >= 1");
  return diameter * std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(budget)));
}

CoverageReport mcdiarmid_coverage(const SyntheticPoolSpec& spec, std::size_t budget,
                                  std::size_t trials, double delta) {
  if (trials < 100) throw Error(ErrorCode::kInvalidArgument, "coverage estimation needs >= 100 trials");
  CoverageReport report;
  report.budget = budget;
  report.trials = trials;
  report.delta = delta;
  report.slack = mcdiarmid_slack(spec.diameter, budget, delta);
  const FeatureMatrix pool = generate_pool(spec);
  const auto w = random_trials(pool, budget, trials, spec.seed);
  report.mean_w1 = mean_of(w);
  const double bound = report.mean_w1 + report.slack;
  const auto covered = std::ranges::count_if(w, [&](double x) { return x <= bound; });
  report.coverage = static_cast<double>(covered) / static_cast<double>(trials);
  return report;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // result * num / i is exact at every step; bail out before overflowing
    if (result > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = result * num / i;
  }
  return result;
}

SelectionResult brute_force_min_w1_subset(const FeatureMatrix& pool, const FeatureMatrix& query,
                                          std::size_t budget) {
  const std::size_t n = pool.rows();
  if (budget == 0 || budget > n) {
    throw Error(ErrorCode::kInvalidArgument, "brute force needs 1 <= budget <= pool size");
  }
  if (binomial(n, budget) > kEnumerationGuard) {
    throw Error(ErrorCode::kCapExceeded, "C(" + std::to_string(n) + ", " + std::to_string(budget) +
                                             ") subsets exceed the enumeration guard of " +
                                             std::to_string(kEnumerationGuard));
  }
  const CostMatrix ground = pairwise_l2(pool, query);
  const std::vector<double> supply(budget, 1.0 / static_cast<double>(budget));
  const std::vector<double> demand(query.rows(), 1.0 / static_cast<double>(query.rows()));

  std::vector<std::size_t> subset(budget);
  std::iota(subset.begin(), subset.end(), std::size_t{0});
  std::vector<std::size_t> best_subset;
  double best = std::numeric_limits<double>::infinity();
  Matrix sub(budget, query.rows());
  while (true) {
    for (std::size_t a = 0; a < budget; ++a) {
      std::ranges::copy(ground.row(subset[a]), sub.row(a).begin());
    }
    const double w = ot::exact_transport(sub, supply, demand).cost;
    // Lexicographic enumeration: only a clear improvement displaces an earlier subset.
    if (best_subset.empty() || w < best - 1e-12 * std::max(1.0, best)) {
      best = w;
      best_subset = subset;
    }
    // next combination
    std::size_t pos = budget;
    while (pos > 0 && subset[pos - 1] == n - budget + pos - 1) --pos;
    if (pos == 0) break;
    ++subset[pos - 1];
    for (std::size_t k = pos; k < budget; ++k) subset[k] = subset[k - 1] + 1;
  }
  SelectionResult r;
  r.method = Method::kBruteForce;
  r.budget = budget;
  r.indices = best_subset;
  r.scores.assign(budget, best);
  return r;
}

DecompositionReport decomposition_check(const FeatureMatrix& pool, const FeatureMatrix& query,
                                        std::span<const std::size_t> random_multiset,
                                        std::span<const std::size_t> star_subset, std::size_t cap) {
  if (star_subset.empty()) throw Error(ErrorCode::kInvalidArgument, "empty reference subset");
  const auto rnd = empirical_support(pool, random_multiset);
  const FeatureMatrix star = pool.select_rows(star_subset);
  const auto w_star = ot::DiscreteMeasure::uniform(star.rows());
  const auto w_query = ot::DiscreteMeasure::uniform(query.rows());
  const auto w_pool = ot::DiscreteMeasure::uniform(pool.rows());

  DecompositionReport r;
  r.rnd_star = ot::exact_w1(rnd.points, star, rnd.weights, w_star, cap);
  r.rnd_query = ot::exact_w1(rnd.points, query, rnd.weights, w_query, cap);
  r.star_query = ot::exact_w1(star, query, w_star, w_query, cap);
  r.rnd_pool = ot::exact_w1(rnd.points, pool, rnd.weights, w_pool, cap);
  r.pool_query = ot::exact_w1(pool, query, w_pool, w_query, cap);
  r.slack_first = r.rnd_query + r.star_query - r.rnd_star;
  r.slack_second = r.rnd_pool + r.pool_query - r.rnd_query;
  r.holds = r.slack_first >= -1e-9 && r.slack_second >= -1e-9;
  return r;
}

}  // namespace tsel::theory
