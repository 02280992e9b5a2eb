// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace tsel::ot::detail {

// Primal network simplex for uncapacitated min-cost flow with exact integer
// costs and real-valued flows. The spanning tree is stored with parent /
// thread / successor-count arrays and kept strongly feasible, which rules
// out cycling on degenerate pivots. Entering arcs are found by block search.
class NetworkSimplex {
 public:
  // supply[u] > 0 produces, < 0 consumes; totals must balance.
  NetworkSimplex(int node_count, std::vector<int> source, std::vector<int> target,
                 std::vector<std::int64_t> cost, std::vector<double> supply);

  // Returns false when the artificial arcs still carry flow at the optimum.
  bool run(std::uint64_t max_pivots);

  double flow(int arc) const { return flow_[static_cast<std::size_t>(arc)]; }
  std::uint64_t pivots() const noexcept { return pivots_; }

 private:
  enum State : int { kUpper = -1, kTree = 0, kLower = 1 };
  enum Dir : int { kDown = -1, kUp = 1 };

  bool find_entering_arc();
  void find_join_node();
  bool find_leaving_arc();
  void change_flow();
  void update_tree_structure();
  void update_potential();

  int node_num_;
  int arc_num_;  // original arcs; artificial arc of node u is arc_num_ + u
  int root_;

  std::vector<int> source_, target_;
  std::vector<std::int64_t> cost_;
  std::vector<double> flow_;
  std::vector<int> state_;
  std::vector<double> supply_;

  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, pred_dir_;
  std::vector<std::int64_t> pi_;
  std::vector<int> dirty_revs_;

  int block_size_ = 0;
  int next_arc_ = 0;
  int in_arc_ = -1, join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1, v_out_ = -1;
  double delta_ = 0.0;
  std::uint64_t pivots_ = 0;
};

}  // namespace tsel::ot::detail
