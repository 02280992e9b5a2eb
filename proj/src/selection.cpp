// SPDX-License-Identifier: Apache-2.0

#include "tsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsel/error.hpp"

namespace tsel {

namespace {

void check_budget(std::size_t budget, std::size_t candidates) {
  if (budget > candidates) {
    throw Error(ErrorCode::kInvalidArgument, "budget " + std::to_string(budget) +
                                                 " exceeds the pool size " + std::to_string(candidates));
  }
}

// Candidates of one cost row sorted by (cost ascending, index ascending), truncated to `count`.
std::vector<std::size_t> nearest(std::span<const double> costs, std::size_t count) {
  std::vector<std::size_t> order(costs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  count = std::min(count, order.size());
  auto closer = [&](std::size_t a, std::size_t b) {
    return costs[a] < costs[b] || (costs[a] == costs[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), closer);
  order.resize(count);
  return order;
}

// Per-query neighborhoods: the L-prefetched nearest candidates, then the first K of them.
std::vector<std::vector<std::size_t>> neighborhoods(const CostMatrix& cost, const KnnParams& p,
                                                    std::size_t k) {
  const std::size_t prefetch = std::min(p.prefetch, cost.candidates());
  if (k > prefetch) {
    throw Error(ErrorCode::kInvalidArgument, "neighborhood size K=" + std::to_string(k) +
                                                 " exceeds the prefetch size L=" + std::to_string(prefetch));
  }
  std::vector<std::vector<std::size_t>> out(cost.queries());
  for (std::size_t j = 0; j < cost.queries(); ++j) {
    out[j] = nearest(cost.row(j), prefetch);
    out[j].resize(k);
  }
  return out;
}

SelectionResult from_scores(Method method, std::span<const double> scores, std::size_t budget) {
  SelectionResult r;
  r.method = method;
  r.budget = budget;
  r.indices = top_by_score(scores, budget);
  r.scores.reserve(r.indices.size());
  for (auto i : r.indices) r.scores.push_back(scores[i]);
  return r;
}

}  // namespace

std::string_view method_tag(Method method) {
  switch (method) {
    case Method::kRoundRobin: return "rr";
    case Method::kDoublyGreedy: return "dg";
    case Method::kKnnUniform: return "knn-uniform";
    case Method::kKnnKde: return "knn-kde";
    case Method::kUot: return "uot";
    case Method::kBruteForce: return "brute-force";
  }
  return "unknown";
}

Method parse_method(std::string_view tag) {
  for (Method m : {Method::kRoundRobin, Method::kDoublyGreedy, Method::kKnnUniform, Method::kKnnKde,
                   Method::kUot, Method::kBruteForce}) {
    if (method_tag(m) == tag) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + std::string(tag) + "'");
}

std::vector<std::size_t> top_by_score(std::span<const double> scores, std::size_t budget) {
  check_budget(budget, scores.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto better = [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(budget), order.end(), better);
  order.resize(budget);
  return order;
}

std::size_t positive_mass_count(std::span<const double> mass) {
  return static_cast<std::size_t>(std::ranges::count_if(mass, [](double m) { return m > 0.0; }));
}

std::size_t neighborhood_size(const KnnParams& p, std::size_t budget, std::size_t queries,
                              std::size_t candidates) {
  if (p.k) {
    if (*p.k == 0) throw Error(ErrorCode::kInvalidArgument, "K must be >= 1");
    if (*p.k > candidates) {
      throw Error(ErrorCode::kInvalidArgument, "K=" + std::to_string(*p.k) + " exceeds the pool size " +
                                                   std::to_string(candidates));
    }
    return *p.k;
  }
  if (queries == 0) throw Error(ErrorCode::kInvalidArgument, "no queries");
  const double raw = std::ceil(p.c * static_cast<double>(budget) / static_cast<double>(queries));
  const auto k = static_cast<std::size_t>(std::max(1.0, raw));
  return std::min(k, candidates);
}

SelectionResult select_round_robin(const SimilarityMatrix& similarity, std::size_t budget) {
  const std::size_t m = similarity.queries();
  const std::size_t n = similarity.candidates();
  check_budget(budget, n);

  SelectionResult r;
  r.method = Method::kRoundRobin;
  r.budget = budget;
  if (budget == 0) return r;

  // Each query's candidates from most to least similar, smaller index first on ties.
  std::vector<std::vector<std::size_t>> ranked(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto row = similarity.row(j);
    auto& order = ranked[j];
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
      return row[a] > row[b] || (row[a] == row[b] && a < b);
    });
  }

  std::vector<char> taken(n, 0);
  std::vector<std::size_t> cursor(m, 0);
  r.indices.reserve(budget);
  r.scores.reserve(budget);
  while (r.indices.size() < budget) {
    bool progressed = false;
    for (std::size_t j = 0; j < m && r.indices.size() < budget; ++j) {
      auto& pos = cursor[j];
      while (pos < n && taken[ranked[j][pos]]) ++pos;
      if (pos == n) continue;  // this query has nothing left; skip its turn
      const std::size_t pick = ranked[j][pos];
      taken[pick] = 1;
      r.indices.push_back(pick);
      r.scores.push_back(similarity(j, pick));
      progressed = true;
    }
    if (!progressed) break;
  }
  return r;
}

std::vector<std::size_t> round_robin_order(const SimilarityMatrix& similarity) {
  return select_round_robin(similarity, similarity.candidates()).indices;
}

SelectionResult select_doubly_greedy(const SimilarityMatrix& similarity, std::size_t budget) {
  check_budget(budget, similarity.candidates());
  std::vector<double> best(similarity.candidates(), -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < similarity.queries(); ++j) {
    const auto row = similarity.row(j);
    for (std::size_t i = 0; i < row.size(); ++i) best[i] = std::max(best[i], row[i]);
  }
  return from_scores(Method::kDoublyGreedy, best, budget);
}

std::vector<double> knn_uniform_mass(const CostMatrix& cost, const KnnParams& p, std::size_t budget) {
  const std::size_t m = cost.queries();
  const std::size_t k = neighborhood_size(p, budget, m, cost.candidates());
  std::vector<double> mass(cost.candidates(), 0.0);
  const double share = 1.0 / (static_cast<double>(m) * static_cast<double>(k));
  for (const auto& hood : neighborhoods(cost, p, k)) {
    for (auto i : hood) mass[i] += share;
  }
  return mass;
}

SelectionResult select_knn_uniform(const CostMatrix& cost, std::size_t budget, const KnnParams& p) {
  check_budget(budget, cost.candidates());
  const auto mass = knn_uniform_mass(cost, p, budget);
  return from_scores(Method::kKnnUniform, mass, budget);
}

std::vector<double> kde_density(const CostMatrix& candidate_cost, const KnnParams& p) {
  const std::size_t n = candidate_cost.candidates();
  if (candidate_cost.queries() != n) {
    throw Error(ErrorCode::kShapeMismatch, "candidate-candidate cost must be square");
  }
  if (!(p.sigma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sigma must be > 0");
  if (p.k_kde == 0) throw Error(ErrorCode::kInvalidArgument, "k_kde must be >= 1");
  for (std::size_t i = 0; i < n; ++i) {
    if (candidate_cost(i, i) > 1e-6) {
      throw Error(ErrorCode::kInvalidArgument,
                  "candidate-candidate cost has nonzero diagonal at " + std::to_string(i));
    }
  }
  const std::size_t k = std::min(p.k_kde, n);
  const double two_sigma_sq = 2.0 * p.sigma * p.sigma;
  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = candidate_cost.row(i);
    double acc = 0.0;
    for (auto j : nearest(row, k)) acc += std::exp(-row[j] * row[j] / two_sigma_sq);
    density[i] = acc / static_cast<double>(k);
    if (!(density[i] > 0.0)) {
      throw Error(ErrorCode::kDegenerateInput, "non-positive KDE density at candidate " + std::to_string(i));
    }
  }
  return density;
}

std::vector<double> knn_kde_mass(const CostMatrix& cost, const CostMatrix& candidate_cost,
                                 const KnnParams& p, std::size_t budget) {
  const std::size_t m = cost.queries();
  const std::size_t n = cost.candidates();
  if (candidate_cost.candidates() != n) {
    throw Error(ErrorCode::kShapeMismatch, "candidate-candidate cost does not match the pool");
  }
  const std::size_t k = neighborhood_size(p, budget, m, n);
  const auto density = kde_density(candidate_cost, p);
  std::vector<double> mass(n, 0.0);
  const double per_query = 1.0 / static_cast<double>(m);
  for (const auto& hood : neighborhoods(cost, p, k)) {
    double norm = 0.0;
    for (auto i : hood) norm += 1.0 / density[i];
    for (auto i : hood) mass[i] += per_query * (1.0 / density[i]) / norm;
  }
  return mass;
}

SelectionResult select_knn_kde(const CostMatrix& cost, const CostMatrix& candidate_cost,
                               std::size_t budget, const KnnParams& p) {
  check_budget(budget, cost.candidates());
  const auto mass = knn_kde_mass(cost, candidate_cost, p, budget);
  return from_scores(Method::kKnnKde, mass, budget);
}

ot::TransportPlan uot_plan(const CostMatrix& cost, const UotParams& p) {
  if (cost.max_value() > 1.0 + 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "UOT selection expects costs normalized to [0, 1] (max is " +
                    std::to_string(cost.max_value()) + ")");
  }
  ot::UnbalancedOptions opts{p.epsilon, p.tau1, p.tau2, p.tol, p.max_iter};
  auto plan = ot::sinkhorn_unbalanced(cost, ot::DiscreteMeasure::uniform(cost.queries()),
                                      ot::DiscreteMeasure::uniform(cost.candidates()), opts);
  if (!plan.converged) {
    const double residual = std::max(plan.row_residual, plan.col_residual);
    throw NotConverged("unbalanced sinkhorn did not converge: " + std::to_string(plan.iterations) +
                           " iterations, residual " + std::to_string(residual),
                       plan.iterations, residual);
  }
  return plan;
}

SelectionResult select_uot(const CostMatrix& cost, std::size_t budget, const UotParams& p) {
  check_budget(budget, cost.candidates());
  const auto plan = uot_plan(cost, p);
  return from_scores(Method::kUot, plan.col_marginal(), budget);
}

}  // namespace tsel
