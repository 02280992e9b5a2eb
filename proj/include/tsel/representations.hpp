// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tsel/matrix.hpp"

namespace tsel {

/// w_i = i / (L (L + 1) / 2) for 1-based position i.
std::vector<double> position_weights(std::size_t length);

/// Position-weighted mean of L hidden states (rows of `hidden`); later tokens weigh more.
std::vector<double> position_weighted_pool(const Matrix& hidden);

struct AdamState {
  std::vector<double> m;  // first moment
  std::vector<double> v;  // second moment, elementwise >= 0
  std::uint64_t step = 0;
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam step direction for gradient g taken from `state`:
///   m_hat = (b1 m + (1 - b1) g) / (1 - b1^(t+1))
///   v_hat = (b2 v + (1 - b2) g^2) / (1 - b2^(t+1))
///   out   = m_hat / (sqrt(v_hat) + eps)
std::vector<double> adam_update(std::span<const double> gradient, const AdamState& state,
                                const AdamHyper& hyper);

inline constexpr std::size_t kDefaultProjectionDim = 8192;

struct ProjectionSpec {
  std::uint64_t seed = 0;
  std::size_t in_dim = 0;
  std::size_t out_dim = kDefaultProjectionDim;
};

/// Entry (row, col) of the implicit in_dim x out_dim projection, +1 or -1.
int projection_entry(const ProjectionSpec& spec, std::size_t row, std::size_t col);

/// Pi^T x for the unscaled Rademacher matrix Pi described by `spec`.
std::vector<double> rademacher_project(std::span<const double> x, const ProjectionSpec& spec);

/// Projects every row of `x`; spec.in_dim must equal x.dims().
FeatureMatrix rademacher_project_rows(const FeatureMatrix& x, const ProjectionSpec& spec);

}  // namespace tsel
