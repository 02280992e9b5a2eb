// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "network_simplex.hpp"
#include "tsel/core.hpp"
#include "tsel/error.hpp"
#include "tsel/ot.hpp"

namespace tsel::ot {

namespace {

constexpr double kCostScale = 1e9;
// Keeps (max scaled cost + 1) * nodes, the artificial arc cost, well inside int64.
constexpr double kMaxArtificialCost = 1e17;

void check_probability(const DiscreteMeasure& m, const char* which) {
  if (!m.is_probability()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(which) + " weights sum to " + std::to_string(m.total()) + ", expected 1");
  }
}

}  // namespace

ExactTransport exact_transport(const Matrix& cost, std::span<const double> supply,
                               std::span<const double> demand) {
  if (cost.rows() != supply.size() || cost.cols() != demand.size()) {
    throw Error(ErrorCode::kShapeMismatch, "transport cost shape does not match supply/demand");
  }
  double total_supply = 0.0, total_demand = 0.0;
  for (double s : supply) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorCode::kInvalidArgument, "bad supply");
    total_supply += s;
  }
  for (double d : demand) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw Error(ErrorCode::kInvalidArgument, "bad demand");
    total_demand += d;
  }
  if (std::abs(total_supply - total_demand) > 1e-9 * std::max(1.0, total_supply)) {
    throw Error(ErrorCode::kInvalidArgument, "supply and demand totals differ");
  }
  for (double c : cost.data()) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw Error(ErrorCode::kInvalidArgument, "transport costs must be finite and nonnegative");
    }
  }

  // Zero-weight points never carry flow; leave them out of the graph.
  std::vector<std::size_t> src_nodes, dst_nodes;
  for (std::size_t i = 0; i < supply.size(); ++i)
    if (supply[i] > 0.0) src_nodes.push_back(i);
  for (std::size_t j = 0; j < demand.size(); ++j)
    if (demand[j] > 0.0) dst_nodes.push_back(j);

  ExactTransport result;
  result.flow = Matrix(cost.rows(), cost.cols());
  if (src_nodes.empty() || dst_nodes.empty()) return result;

  const int n = static_cast<int>(src_nodes.size());
  const int m = static_cast<int>(dst_nodes.size());
  double max_cost = 0.0;
  for (auto i : src_nodes)
    for (auto j : dst_nodes) max_cost = std::max(max_cost, cost(i, j));
  double scale = kCostScale;
  if (max_cost > 0.0) {
    scale = std::min(scale, kMaxArtificialCost / ((max_cost + 1.0) * (n + m + 1)));
  }

  std::vector<int> arc_src, arc_dst;
  std::vector<std::int64_t> arc_cost;
  const std::size_t arcs = static_cast<std::size_t>(n) * static_cast<std::size_t>(m);
  arc_src.reserve(arcs);
  arc_dst.reserve(arcs);
  arc_cost.reserve(arcs);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < m; ++b) {
      arc_src.push_back(a);
      arc_dst.push_back(n + b);
      arc_cost.push_back(static_cast<std::int64_t>(
          std::llround(cost(src_nodes[static_cast<std::size_t>(a)], dst_nodes[static_cast<std::size_t>(b)]) *
                       scale)));
    }
  }
  std::vector<double> node_supply(static_cast<std::size_t>(n + m));
  for (int a = 0; a < n; ++a) node_supply[static_cast<std::size_t>(a)] = supply[src_nodes[static_cast<std::size_t>(a)]];
  for (int b = 0; b < m; ++b) node_supply[static_cast<std::size_t>(n + b)] = -demand[dst_nodes[static_cast<std::size_t>(b)]];

  detail::NetworkSimplex solver(n + m, std::move(arc_src), std::move(arc_dst), std::move(arc_cost),
                                std::move(node_supply));
  const std::uint64_t max_pivots = 1000ULL * arcs + 100000ULL;
  if (!solver.run(max_pivots)) {
    throw Error(ErrorCode::kDegenerateInput, "transport problem is infeasible");
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < m; ++b) {
      const double f = solver.flow(a * m + b);
      const auto i = src_nodes[static_cast<std::size_t>(a)];
      const auto j = dst_nodes[static_cast<std::size_t>(b)];
      result.flow(i, j) = f;
      result.cost += f * cost(i, j);
    }
  }
  return result;
}

double exact_w1(const FeatureMatrix& x, const FeatureMatrix& y, const DiscreteMeasure& wx,
                const DiscreteMeasure& wy, std::size_t cap) {
  if (x.rows() > cap || y.rows() > cap) {
    throw Error(ErrorCode::kCapExceeded,
                "exact W1 supports at most " + std::to_string(cap) + " points per side (got " +
                    std::to_string(x.rows()) + " and " + std::to_string(y.rows()) +
                    "); use the entropic approximation instead");
  }
  if (wx.size() != x.rows() || wy.size() != y.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "measure sizes do not match the point sets");
  }
  check_probability(wx, "x");
  check_probability(wy, "y");
  const CostMatrix ground = pairwise_l2(x, y);
  return exact_transport(ground.values(), wx.weights(), wy.weights()).cost;
}

double exact_w1(const FeatureMatrix& x, const FeatureMatrix& y, std::size_t cap) {
  return exact_w1(x, y, DiscreteMeasure::uniform(x.rows()), DiscreteMeasure::uniform(y.rows()), cap);
}

double entropic_w1(const FeatureMatrix& x, const FeatureMatrix& y, const DiscreteMeasure& wx,
                   const DiscreteMeasure& wy, const SinkhornOptions& options) {
  const CostMatrix ground = pairwise_l2(x, y);
  const TransportPlan plan = sinkhorn(ground, wx, wy, options);
  if (!plan.converged) {
    throw NotConverged("entropic W1: sinkhorn did not converge after " +
                           std::to_string(plan.iterations) + " iterations (residual " +
                           std::to_string(std::max(plan.row_residual, plan.col_residual)) + ")",
                       plan.iterations, std::max(plan.row_residual, plan.col_residual));
  }
  return plan.transport_cost(ground);
}

}  // namespace tsel::ot
