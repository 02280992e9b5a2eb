// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "tsel/matrix.hpp"
#include "tsel/ot.hpp"
#include "tsel/selection.hpp"

namespace tsel {

/// Contiguous blocks of an ordering; block 0 is quantile 1 (closest).
struct QuantileAssignment {
  std::vector<std::vector<std::size_t>> blocks;

  std::size_t n_quantiles() const noexcept { return blocks.size(); }
  std::vector<std::size_t> concatenated() const;
};

/// Splits `order` into n contiguous blocks whose sizes differ by at most one;
/// earlier blocks take the remainder.
QuantileAssignment split_contiguous(std::span<const std::size_t> order, std::size_t n);

/// Full round-robin ordering of the candidates, split into n quantiles.
QuantileAssignment stratify_quantiles(const SimilarityMatrix& similarity, std::size_t n_quantiles);

/// Re-splits quantile `which` (1-based) into n_sub blocks.
QuantileAssignment sub_stratify(const QuantileAssignment& q, std::size_t which, std::size_t n_sub);

/// First min(take, size) entries of a block.
std::vector<std::size_t> take_front(std::span<const std::size_t> block, std::size_t take);

/// 1-based ranks, ties get the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> xs);

double spearman(std::span<const double> xs, std::span<const double> ys);

/// |a n b| / |a u b|; two empty sets give 1.
double jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b);

struct W1Options {
  std::size_t cap = ot::kDefaultOracleCap;
  double fallback_epsilon = 0.01;  // entropic estimate used above the cap
};

/// W1 between uniform measures on the selected pool rows and the query rows.
double subset_query_w1(const SelectionResult& selection, const FeatureMatrix& pool,
                       const FeatureMatrix& query, const W1Options& options = {});

}  // namespace tsel
