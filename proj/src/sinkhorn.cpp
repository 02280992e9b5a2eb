// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "tsel/error.hpp"
#include "tsel/kernels.hpp"
#include "tsel/ot.hpp"

namespace tsel::ot {

DiscreteMeasure::DiscreteMeasure(std::vector<double> weights) : weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "measure weights must be finite and nonnegative");
    }
  }
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "uniform measure over an empty support");
  return DiscreteMeasure(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double DiscreteMeasure::total() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

bool DiscreteMeasure::is_probability(double tol) const { return std::abs(total() - 1.0) <= tol; }

double TransportPlan::total_mass() const {
  double s = 0.0;
  for (double v : values.data()) s += v;
  return s;
}

double TransportPlan::transport_cost(const CostMatrix& cost) const {
  if (cost.queries() != values.rows() || cost.candidates() != values.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "cost and plan shapes differ");
  }
  double s = 0.0;
  const auto c = cost.values().data();
  const auto p = values.data();
  for (std::size_t k = 0; k < p.size(); ++k) s += c[k] * p[k];
  return s;
}

namespace {

struct Side {
  std::vector<double> log_weight;
  double tau;  // infinity for a hard marginal
};

std::vector<double> log_weights(const DiscreteMeasure& m) {
  std::vector<double> out(m.size());
  for (std::size_t k = 0; k < m.size(); ++k) out[k] = std::log(m[k]);
  return out;
}

// Potential update for one side: f = lambda * eps * (log a - lse), lambda = tau / (tau + eps).
void update_potential(const Side& side, std::span<const double> lse, double epsilon,
                      std::span<double> potential) {
  const double lambda = std::isinf(side.tau) ? 1.0 : side.tau / (side.tau + epsilon);
  for (std::size_t k = 0; k < potential.size(); ++k) {
    potential[k] = lambda * epsilon * (side.log_weight[k] - lse[k]);
  }
}

// L-inf distance between the current marginal exp(f/eps + lse) and the one the
// KL stationarity condition asks for, a * exp(-f / tau).
double marginal_residual(const Side& side, std::span<const double> potential,
                         std::span<const double> lse, double epsilon) {
  double worst = 0.0;
  for (std::size_t k = 0; k < potential.size(); ++k) {
    if (potential[k] == -kInfinity) continue;  // zero-weight point, carries no mass
    const double current = std::exp(potential[k] / epsilon + lse[k]);
    double target = std::exp(side.log_weight[k]);
    if (!std::isinf(side.tau)) target *= std::exp(-potential[k] / side.tau);
    worst = std::max(worst, std::abs(current - target));
  }
  return worst;
}

// Hard sides must meet tol; soft sides only count when no side is hard.
bool converged(const Side& rows, const Side& cols, const TransportPlan& plan, double tol) {
  const bool row_hard = std::isinf(rows.tau);
  const bool col_hard = std::isinf(cols.tau);
  if (row_hard || col_hard) {
    return (!row_hard || plan.row_residual <= tol) && (!col_hard || plan.col_residual <= tol);
  }
  return std::max(plan.row_residual, plan.col_residual) <= tol;
}

constexpr std::size_t kWarmStartSweeps = 50;

TransportPlan solve(const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                    double epsilon, double tau1, double tau2, double tol, std::size_t max_iter) {
  if (mu.size() != cost.queries() || nu.size() != cost.candidates()) {
    throw Error(ErrorCode::kShapeMismatch, "marginal sizes do not match the cost matrix");
  }
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  if (!(tau1 > 0.0) || !(tau2 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tau must be > 0");
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be > 0");

  const Matrix& c = cost.values();
  const Matrix ct = c.transposed();
  const Side rows{log_weights(mu), tau1};
  const Side cols{log_weights(nu), tau2};

  std::vector<double> f(c.rows(), 0.0), g(c.cols(), 0.0);
  std::vector<double> row_lse(c.rows()), col_lse(c.cols());

  TransportPlan plan;
  auto sweep = [&](double eps) {
    update_potential(rows, row_lse, eps, f);
    kernels::omp::log_sum_exp_rows(ct, f, eps, col_lse);
    update_potential(cols, col_lse, eps, g);
    kernels::omp::log_sum_exp_rows(c, g, eps, row_lse);
    plan.row_residual = marginal_residual(rows, f, row_lse, eps);
    plan.col_residual = marginal_residual(cols, g, col_lse, eps);
    return std::isfinite(plan.row_residual) && std::isfinite(plan.col_residual);
  };

  // Epsilon scaling: warm-start the potentials with a few sweeps at each of a
  // geometric sequence of larger regularizations. These sweeps are not counted
  // against max_iter.
  for (double e = cost.max_value() / 2.0; e > epsilon; e /= 2.0) {
    kernels::omp::log_sum_exp_rows(c, g, e, row_lse);
    for (std::size_t k = 0; k < kWarmStartSweeps; ++k) {
      if (!sweep(e) || converged(rows, cols, plan, tol)) break;
    }
  }

  kernels::omp::log_sum_exp_rows(c, g, epsilon, row_lse);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    plan.iterations = it;
    if (!sweep(epsilon)) break;
    if (converged(rows, cols, plan, tol)) {
      plan.converged = true;
      break;
    }
  }

  plan.values = Matrix(c.rows(), c.cols());
  for (std::size_t j = 0; j < c.rows(); ++j) {
    for (std::size_t i = 0; i < c.cols(); ++i) {
      plan.values(j, i) = std::exp((f[j] + g[i] - c(j, i)) / epsilon);
    }
  }
  return plan;
}

}  // namespace

TransportPlan sinkhorn(const CostMatrix& cost, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const SinkhornOptions& options) {
  if (!mu.is_probability() || !nu.is_probability()) {
    throw Error(ErrorCode::kInvalidArgument, "balanced sinkhorn needs marginals summing to 1");
  }
  return solve(cost, mu, nu, options.epsilon, kInfinity, kInfinity, options.tol, options.max_iter);
}

TransportPlan sinkhorn_unbalanced(const CostMatrix& cost, const DiscreteMeasure& mu,
                                  const DiscreteMeasure& nu, const UnbalancedOptions& options) {
  return solve(cost, mu, nu, options.epsilon, options.tau1, options.tau2, options.tol,
               options.max_iter);
}

}  // namespace tsel::ot
