// SPDX-License-Identifier: Apache-2.0

#include "tsel/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsel/error.hpp"
#include "tsel/kernels.hpp"

namespace tsel {

namespace {

void require_nonzero_norms(std::span<const double> norms, const char* which) {
  for (std::size_t r = 0; r < norms.size(); ++r) {
    if (norms[r] == 0.0) {
      throw Error(ErrorCode::kDegenerateInput,
                  std::string(which) + " row " + std::to_string(r) + " has zero norm");
    }
  }
}

double clamp_similarity(double s) {
  if (s > 1.0 + kSimilaritySlack || s < -1.0 - kSimilaritySlack) {
    throw Error(ErrorCode::kInvalidArgument,
                "similarity " + std::to_string(s) + " outside [-1, 1]");
  }
  return std::clamp(s, -1.0, 1.0);
}

void clamp_all(Matrix& m) {
  for (double& v : m.data()) v = clamp_similarity(v);
}

Matrix raw_cosine(const FeatureMatrix& queries, const FeatureMatrix& candidates) {
  if (queries.dims() != candidates.dims()) {
    throw Error(ErrorCode::kShapeMismatch, "query dims " + std::to_string(queries.dims()) +
                                               " != candidate dims " +
                                               std::to_string(candidates.dims()));
  }
  const auto qn = kernels::omp::row_norms(queries.values());
  const auto cn = kernels::omp::row_norms(candidates.values());
  require_nonzero_norms(qn, "query");
  require_nonzero_norms(cn, "candidate");
  return kernels::omp::cosine(queries.values(), qn, candidates.values(), cn);
}

}  // namespace

CheckpointFeatureStore::CheckpointFeatureStore(std::vector<FeatureMatrix> checkpoints,
                                               std::vector<double> weights)
    : checkpoints_(std::move(checkpoints)), weights_(std::move(weights)) {
  if (checkpoints_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "checkpoint store needs at least one checkpoint");
  }
  if (weights_.size() != checkpoints_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "one weight per checkpoint required");
  }
  for (const auto& c : checkpoints_) {
    if (c.rows() != rows() || c.dims() != dims()) {
      throw Error(ErrorCode::kShapeMismatch, "checkpoint matrices must share rows and dims");
    }
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "checkpoint weights must be finite and nonnegative");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "checkpoint weights sum to " + std::to_string(total) + ", expected 1");
  }
}

CheckpointFeatureStore::CheckpointFeatureStore(FeatureMatrix single)
    : CheckpointFeatureStore(std::vector<FeatureMatrix>{std::move(single)}, {1.0}) {}

CheckpointFeatureStore CheckpointFeatureStore::from_learning_rates(
    std::vector<FeatureMatrix> checkpoints, std::span<const double> learning_rates) {
  return CheckpointFeatureStore(std::move(checkpoints), normalize_weights(learning_rates));
}

std::vector<double> normalize_weights(std::span<const double> raw) {
  double total = 0.0;
  for (double w : raw) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "learning rates must be finite and nonnegative");
    }
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning rates sum to zero");
  std::vector<double> out(raw.begin(), raw.end());
  for (double& w : out) w /= total;
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kShapeMismatch, "cosine of vectors with different dims");
  }
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  const double na = std::sqrt(aa);
  const double nb = std::sqrt(bb);
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::kDegenerateInput, "cosine of a zero-norm vector");
  }
  return clamp_similarity(dot / (na * nb));
}

SimilarityMatrix pairwise_cosine(const FeatureMatrix& queries, const FeatureMatrix& candidates) {
  Matrix s = raw_cosine(queries, candidates);
  clamp_all(s);
  return SimilarityMatrix(std::move(s));
}

SimilarityMatrix weighted_checkpoint_similarity(const CheckpointFeatureStore& queries,
                                                const CheckpointFeatureStore& candidates) {
  if (queries.num_checkpoints() != candidates.num_checkpoints()) {
    throw Error(ErrorCode::kShapeMismatch, "query and candidate stores have different checkpoint counts");
  }
  const auto weights = queries.weights();
  for (std::size_t t = 0; t < weights.size(); ++t) {
    if (std::abs(weights[t] - candidates.weights()[t]) > 1e-12) {
      throw Error(ErrorCode::kInvalidArgument, "query and candidate stores disagree on checkpoint weights");
    }
  }
  Matrix acc(queries.rows(), candidates.rows());
  for (std::size_t t = 0; t < weights.size(); ++t) {
    Matrix s = raw_cosine(queries.checkpoint(t), candidates.checkpoint(t));
    clamp_all(s);
    auto out = acc.data();
    const auto in = s.data();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += weights[t] * in[k];
  }
  clamp_all(acc);
  return SimilarityMatrix(std::move(acc));
}

CostMatrix similarity_to_cost(const SimilarityMatrix& similarity, bool half_normalize) {
  Matrix c(similarity.queries(), similarity.candidates());
  const auto in = similarity.values().data();
  auto out = c.data();
  for (std::size_t k = 0; k < in.size(); ++k) {
    const double s = clamp_similarity(in[k]);
    out[k] = half_normalize ? (1.0 - s) / 2.0 : 1.0 - s;
  }
  return CostMatrix(std::move(c));
}

CostMatrix pairwise_l2(const FeatureMatrix& queries, const FeatureMatrix& candidates) {
  if (queries.dims() != candidates.dims()) {
    throw Error(ErrorCode::kShapeMismatch, "query dims " + std::to_string(queries.dims()) +
                                               " != candidate dims " +
                                               std::to_string(candidates.dims()));
  }
  return CostMatrix(kernels::omp::l2_distance(queries.values(), candidates.values()));
}

}  // namespace tsel
