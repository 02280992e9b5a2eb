// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <span>
#include <vector>

#include "tsel/matrix.hpp"

namespace tsel::ot {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Nonnegative weights over support indices.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(std::vector<double> weights);
  static DiscreteMeasure uniform(std::size_t n);

  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }
  double total() const;
  bool is_probability(double tol = 1e-9) const;

 private:
  std::vector<double> weights_;
};

struct TransportPlan {
  Matrix values;
  bool converged = false;
  std::size_t iterations = 0;
  double row_residual = 0.0;  // L-inf residual of the first (query) marginal
  double col_residual = 0.0;  // L-inf residual of the second (candidate) marginal

  std::vector<double> row_marginal() const { return values.row_sums(); }
  std::vector<double> col_marginal() const { return values.col_sums(); }
  double total_mass() const;
  /// <C, plan>
  double transport_cost(const CostMatrix& cost) const;
};

struct SinkhornOptions {
  double epsilon = 0.01;
  double tol = 1e-9;
  std::size_t max_iter = 10000;
};

struct UnbalancedOptions {
  double epsilon = 0.01;
  double tau1 = kInfinity;  // kInfinity makes the first marginal a hard constraint
  double tau2 = 1e-4;
  double tol = 1e-9;
  std::size_t max_iter = 10000;
};

/// Balanced entropic OT, log-domain Sinkhorn. Non-convergence is reported
/// through plan.converged, not thrown.
TransportPlan sinkhorn(const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const SinkhornOptions& options = {});

/// Entropic OT with KL marginal penalties tau1 (rows) and tau2 (columns).
/// Potentials are scaled by tau / (tau + epsilon) each half-step; tau = inf
/// recovers the hard constraint on that side.
TransportPlan sinkhorn_unbalanced(const CostMatrix& cost, const DiscreteMeasure& mu,
                                  const DiscreteMeasure& nu, const UnbalancedOptions& options = {});

inline constexpr std::size_t kDefaultOracleCap = 512;

struct ExactTransport {
  double cost = 0.0;
  Matrix flow;
};

/// Exact minimum-cost transport between supply and demand (equal totals) by
/// network simplex. Costs are rounded to integers after scaling by up to 1e9;
/// the returned cost is evaluated on the unrounded matrix.
ExactTransport exact_transport(const Matrix& cost, std::span<const double> supply,
                               std::span<const double> demand);

/// Exact 1-Wasserstein distance with Euclidean ground cost.
double exact_w1(const FeatureMatrix& x, const FeatureMatrix& y, const DiscreteMeasure& wx,
                const DiscreteMeasure& wy, std::size_t cap = kDefaultOracleCap);
double exact_w1(const FeatureMatrix& x, const FeatureMatrix& y, std::size_t cap = kDefaultOracleCap);

/// <C, plan> for the balanced entropic plan; an upper bound on exact_w1.
double entropic_w1(const FeatureMatrix& x, const FeatureMatrix& y, const DiscreteMeasure& wx,
                   const DiscreteMeasure& wy, const SinkhornOptions& options = {});

}  // namespace tsel::ot
