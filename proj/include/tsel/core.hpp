// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "tsel/matrix.hpp"

namespace tsel {

/// Per-checkpoint representations of the same samples, with normalized
/// learning-rate weights (nonnegative, summing to 1).
class CheckpointFeatureStore {
 public:
  CheckpointFeatureStore(std::vector<FeatureMatrix> checkpoints, std::vector<double> weights);

  /// Single checkpoint with weight 1.
  explicit CheckpointFeatureStore(FeatureMatrix single);

  /// Weights are raw learning rates; they are divided by their sum.
  static CheckpointFeatureStore from_learning_rates(std::vector<FeatureMatrix> checkpoints,
                                                    std::span<const double> learning_rates);

  std::size_t num_checkpoints() const noexcept { return checkpoints_.size(); }
  std::size_t rows() const noexcept { return checkpoints_.front().rows(); }
  std::size_t dims() const noexcept { return checkpoints_.front().dims(); }
  const FeatureMatrix& checkpoint(std::size_t t) const { return checkpoints_.at(t); }
  std::span<const double> weights() const noexcept { return weights_; }

 private:
  std::vector<FeatureMatrix> checkpoints_;
  std::vector<double> weights_;
};

/// Raw learning rates divided by their sum. Rejects negatives and an all-zero vector.
std::vector<double> normalize_weights(std::span<const double> raw);

/// Entries within this distance outside [-1, 1] are clamped; beyond it they are errors.
inline constexpr double kSimilaritySlack = 1e-9;

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// entry (j, i) = cos(Q_j, C_i). Zero-norm rows are rejected.
SimilarityMatrix pairwise_cosine(const FeatureMatrix& queries, const FeatureMatrix& candidates);

/// entry (j, i) = sum_t w_t cos(Q_t[j], C_t[i]).
SimilarityMatrix weighted_checkpoint_similarity(const CheckpointFeatureStore& queries,
                                                const CheckpointFeatureStore& candidates);

/// c = 1 - s, or (1 - s) / 2 with half_normalize so that [-1, 1] maps onto [0, 1].
CostMatrix similarity_to_cost(const SimilarityMatrix& similarity, bool half_normalize);

/// entry (j, i) = ||Q_j - C_i||_2
CostMatrix pairwise_l2(const FeatureMatrix& queries, const FeatureMatrix& candidates);

}  // namespace tsel
