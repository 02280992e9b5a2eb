// SPDX-License-Identifier: Apache-2.0

#include "tsel/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "tsel/error.hpp"

namespace tsel {

std::vector<std::size_t> QuantileAssignment::concatenated() const {
  std::vector<std::size_t> out;
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

QuantileAssignment split_contiguous(std::span<const std::size_t> order, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "number of quantiles must be >= 1");
  if (n > order.size()) {
    throw Error(ErrorCode::kInvalidArgument, std::to_string(n) + " quantiles requested for " +
                                                 std::to_string(order.size()) + " items");
  }
  const std::size_t base = order.size() / n;
  const std::size_t extra = order.size() % n;
  QuantileAssignment q;
  q.blocks.reserve(n);
  std::size_t start = 0;
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t len = base + (b < extra ? 1 : 0);
    q.blocks.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                          order.begin() + static_cast<std::ptrdiff_t>(start + len));
    start += len;
  }
  return q;
}

QuantileAssignment stratify_quantiles(const SimilarityMatrix& similarity, std::size_t n_quantiles) {
  if (n_quantiles == 0 || n_quantiles > similarity.candidates()) {
    throw Error(ErrorCode::kInvalidArgument,
                "need 1 <= quantiles <= " + std::to_string(similarity.candidates()));
  }
  const auto order = round_robin_order(similarity);
  return split_contiguous(order, n_quantiles);
}

QuantileAssignment sub_stratify(const QuantileAssignment& q, std::size_t which, std::size_t n_sub) {
  if (which == 0 || which > q.n_quantiles()) {
    throw Error(ErrorCode::kInvalidArgument,
                "quantile " + std::to_string(which) + " out of range 1.." + std::to_string(q.n_quantiles()));
  }
  return split_contiguous(q.blocks[which - 1], n_sub);
}

std::vector<std::size_t> take_front(std::span<const std::size_t> block, std::size_t take) {
  const std::size_t n = std::min(take, block.size());
  return {block.begin(), block.begin() + static_cast<std::ptrdiff_t>(n)};
}

std::vector<double> average_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && xs[order[end]] == xs[order[start]]) ++end;
    // positions start..end-1 hold ranks start+1..end
    const double mean_rank = (static_cast<double>(start + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = mean_rank;
    start = end;
  }
  return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::kShapeMismatch, "spearman needs equal lengths");
  if (xs.size() < 2) throw Error(ErrorCode::kInvalidArgument, "spearman needs at least 2 points");
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!std::isfinite(xs[k]) || !std::isfinite(ys[k])) {
      throw Error(ErrorCode::kNonFinite, "spearman input is not finite");
    }
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < rx.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kDegenerateInput, "spearman is undefined for a constant sequence");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double jaccard(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  const std::set<std::size_t> sa(a.begin(), a.end());
  const std::set<std::size_t> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t common = 0;
  for (auto x : sa) common += sb.count(x);
  const std::size_t uni = sa.size() + sb.size() - common;
  return static_cast<double>(common) / static_cast<double>(uni);
}

double subset_query_w1(const SelectionResult& selection, const FeatureMatrix& pool,
                       const FeatureMatrix& query, const W1Options& options) {
  if (selection.indices.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "W1 of an empty selection is undefined");
  }
  const FeatureMatrix subset = pool.select_rows(selection.indices);
  const auto ws = ot::DiscreteMeasure::uniform(subset.rows());
  const auto wq = ot::DiscreteMeasure::uniform(query.rows());
  if (subset.rows() <= options.cap && query.rows() <= options.cap) {
    return ot::exact_w1(subset, query, ws, wq, options.cap);
  }
  ot::SinkhornOptions s;
  s.epsilon = options.fallback_epsilon;
  return ot::entropic_w1(subset, query, ws, wq, s);
}

}  // namespace tsel
