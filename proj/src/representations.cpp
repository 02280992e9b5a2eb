// SPDX-License-Identifier: Apache-2.0

#include "tsel/representations.hpp"

#include <cmath>
#include <string>

#include "tsel/error.hpp"
#include "tsel/kernels.hpp"

namespace tsel {

std::vector<double> position_weights(std::size_t length) {
  if (length == 0) throw Error(ErrorCode::kInvalidArgument, "position weights need length >= 1");
  const double total = static_cast<double>(length) * static_cast<double>(length + 1) / 2.0;
  std::vector<double> w(length);
  for (std::size_t i = 0; i < length; ++i) w[i] = static_cast<double>(i + 1) / total;
  return w;
}

std::vector<double> position_weighted_pool(const Matrix& hidden) {
  if (hidden.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "cannot pool an empty sequence");
  const auto w = position_weights(hidden.rows());
  std::vector<double> out(hidden.cols(), 0.0);
  for (std::size_t i = 0; i < hidden.rows(); ++i) {
    const auto h = hidden.row(i);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += w[i] * h[k];
  }
  return out;
}

std::vector<double> adam_update(std::span<const double> gradient, const AdamState& state,
                                const AdamHyper& hyper) {
  const std::size_t n = gradient.size();
  if (state.m.size() != n || state.v.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "adam state dims do not match the gradient");
  }
  if (!(hyper.beta1 >= 0.0 && hyper.beta1 < 1.0) || !(hyper.beta2 >= 0.0 && hyper.beta2 < 1.0) ||
      !(hyper.epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "adam hyperparameters need beta in [0,1) and epsilon > 0");
  }
  const double t = static_cast<double>(state.step + 1);
  const double c1 = 1.0 - std::pow(hyper.beta1, t);
  const double c2 = 1.0 - std::pow(hyper.beta2, t);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double g = gradient[k];
    if (!std::isfinite(g) || !std::isfinite(state.m[k]) || !std::isfinite(state.v[k])) {
      throw Error(ErrorCode::kNonFinite, "non-finite adam input at coordinate " + std::to_string(k));
    }
    if (state.v[k] < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "negative second moment at coordinate " + std::to_string(k));
    }
    const double m_hat = (hyper.beta1 * state.m[k] + (1.0 - hyper.beta1) * g) / c1;
    const double v_hat = (hyper.beta2 * state.v[k] + (1.0 - hyper.beta2) * g * g) / c2;
    out[k] = m_hat / (std::sqrt(v_hat) + hyper.epsilon);
  }
  return out;
}

int projection_entry(const ProjectionSpec& spec, std::size_t row, std::size_t col) {
  if (row >= spec.in_dim || col >= spec.out_dim) {
    throw Error(ErrorCode::kInvalidArgument, "projection entry out of range");
  }
  return kernels::rademacher_sign(spec.seed, row, col);
}

std::vector<double> rademacher_project(std::span<const double> x, const ProjectionSpec& spec) {
  if (x.size() != spec.in_dim) {
    throw Error(ErrorCode::kShapeMismatch, "projection input has " + std::to_string(x.size()) +
                                               " dims, spec expects " + std::to_string(spec.in_dim));
  }
  if (spec.out_dim == 0) throw Error(ErrorCode::kInvalidArgument, "projection out_dim must be >= 1");
  Matrix single(1, x.size(), std::vector<double>(x.begin(), x.end()));
  const Matrix y = kernels::omp::rademacher_project(single, spec.seed, spec.out_dim);
  const auto r = y.row(0);
  return {r.begin(), r.end()};
}

FeatureMatrix rademacher_project_rows(const FeatureMatrix& x, const ProjectionSpec& spec) {
  if (x.dims() != spec.in_dim) {
    throw Error(ErrorCode::kShapeMismatch, "projection input has " + std::to_string(x.dims()) +
                                               " dims, spec expects " + std::to_string(spec.in_dim));
  }
  if (spec.out_dim == 0) throw Error(ErrorCode::kInvalidArgument, "projection out_dim must be >= 1");
  return FeatureMatrix(kernels::omp::rademacher_project(x.values(), spec.seed, spec.out_dim));
}

}  // namespace tsel
