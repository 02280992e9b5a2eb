// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsel/matrix.hpp"
#include "tsel/ot.hpp"

namespace tsel {

enum class Method { kRoundRobin, kDoublyGreedy, kKnnUniform, kKnnKde, kUot, kBruteForce };

std::string_view method_tag(Method method);
Method parse_method(std::string_view tag);

struct SelectionResult {
  Method method = Method::kRoundRobin;
  std::size_t budget = 0;
  std::vector<std::size_t> indices;  // distinct, in selection order
  std::vector<double> scores;        // one per index
};

struct KnnParams {
  std::optional<std::size_t> k;  // neighborhood size; derived from c when absent
  std::size_t prefetch = 5000;   // L: neighbors scanned per query
  std::size_t k_kde = 1000;
  double sigma = 0.75;
  double c = 5.0;
  double alpha = 0.01;
};

struct UotParams {
  double epsilon = 0.01;
  double tau1 = ot::kInfinity;
  double tau2 = 1e-4;
  double tol = 1e-9;
  std::size_t max_iter = 10000;
};

/// K = max(1, ceil(c * budget / queries)) capped at candidates, unless p.k is set.
std::size_t neighborhood_size(const KnnParams& p, std::size_t budget, std::size_t queries,
                              std::size_t candidates);

/// Queries take turns (row order) picking their most similar unselected candidate.
SelectionResult select_round_robin(const SimilarityMatrix& similarity, std::size_t budget);

/// Complete round-robin ordering of all candidates.
std::vector<std::size_t> round_robin_order(const SimilarityMatrix& similarity);

/// Top-B candidates by their best similarity to any query.
SelectionResult select_doubly_greedy(const SimilarityMatrix& similarity, std::size_t budget);

/// Mass 1/(M K) on each query's K nearest candidates.
std::vector<double> knn_uniform_mass(const CostMatrix& cost, const KnnParams& p, std::size_t budget);
SelectionResult select_knn_uniform(const CostMatrix& cost, std::size_t budget, const KnnParams& p = {});

/// Gaussian KDE over each candidate's k_kde nearest candidates (itself included).
std::vector<double> kde_density(const CostMatrix& candidate_cost, const KnnParams& p);

/// Each query spreads 1/M over its K nearest candidates proportionally to 1/density.
std::vector<double> knn_kde_mass(const CostMatrix& cost, const CostMatrix& candidate_cost,
                                 const KnnParams& p, std::size_t budget);
SelectionResult select_knn_kde(const CostMatrix& cost, const CostMatrix& candidate_cost,
                               std::size_t budget, const KnnParams& p = {});

/// Candidate column mass of the unbalanced plan between uniform query and candidate
/// marginals. Throws NotConverged when the solver misses its tolerance.
ot::TransportPlan uot_plan(const CostMatrix& cost, const UotParams& p);
SelectionResult select_uot(const CostMatrix& cost, std::size_t budget, const UotParams& p = {});

/// Positions of the `budget` largest scores, ties to the smaller index.
std::vector<std::size_t> top_by_score(std::span<const double> scores, std::size_t budget);

/// Number of entries with strictly positive mass.
std::size_t positive_mass_count(std::span<const double> mass);

}  // namespace tsel
