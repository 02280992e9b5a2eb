// SPDX-License-Identifier: Apache-2.0

#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsel/error.hpp"

namespace tsel::ot::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

NetworkSimplex::NetworkSimplex(int node_count, std::vector<int> source, std::vector<int> target,
                               std::vector<std::int64_t> cost, std::vector<double> supply)
    : node_num_(node_count),
      arc_num_(static_cast<int>(source.size())),
      root_(node_count),
      source_(std::move(source)),
      target_(std::move(target)),
      cost_(std::move(cost)),
      supply_(std::move(supply)) {
  const std::size_t all_arcs = static_cast<std::size_t>(arc_num_ + node_num_);
  const std::size_t all_nodes = static_cast<std::size_t>(node_num_ + 1);
  source_.resize(all_arcs);
  target_.resize(all_arcs);
  cost_.resize(all_arcs);
  flow_.assign(all_arcs, 0.0);
  state_.assign(all_arcs, kLower);
  parent_.assign(all_nodes, -1);
  pred_.assign(all_nodes, -1);
  thread_.assign(all_nodes, 0);
  rev_thread_.assign(all_nodes, 0);
  succ_num_.assign(all_nodes, 0);
  last_succ_.assign(all_nodes, 0);
  pred_dir_.assign(all_nodes, kUp);
  pi_.assign(all_nodes, 0);

  std::int64_t max_cost = 0;
  for (int e = 0; e < arc_num_; ++e) max_cost = std::max(max_cost, cost_[static_cast<std::size_t>(e)]);
  const std::int64_t art_cost = (max_cost + 1) * static_cast<std::int64_t>(node_num_ + 1);

  // Initial tree: every node hangs off the root through its artificial arc.
  const auto r = static_cast<std::size_t>(root_);
  parent_[r] = -1;
  pred_[r] = -1;
  thread_[r] = 0;
  rev_thread_[0] = root_;
  succ_num_[r] = node_num_ + 1;
  last_succ_[r] = root_ - 1;
  pi_[r] = 0;
  for (int u = 0; u < node_num_; ++u) {
    const auto uu = static_cast<std::size_t>(u);
    const auto e = static_cast<std::size_t>(arc_num_ + u);
    parent_[uu] = root_;
    pred_[uu] = static_cast<int>(e);
    thread_[uu] = u + 1;
    rev_thread_[uu + 1] = u;
    succ_num_[uu] = 1;
    last_succ_[uu] = u;
    state_[e] = kTree;
    if (supply_[uu] >= 0.0) {
      pred_dir_[uu] = kUp;
      pi_[uu] = 0;
      source_[e] = u;
      target_[e] = root_;
      flow_[e] = supply_[uu];
      cost_[e] = 0;
    } else {
      pred_dir_[uu] = kDown;
      pi_[uu] = art_cost;
      source_[e] = root_;
      target_[e] = u;
      flow_[e] = -supply_[uu];
      cost_[e] = art_cost;
    }
  }

  block_size_ = std::max(static_cast<int>(std::sqrt(static_cast<double>(arc_num_))), 10);
}

bool NetworkSimplex::find_entering_arc() {
  if (arc_num_ == 0) return false;
  std::int64_t best = 0;
  int cnt = block_size_;
  int e = next_arc_;
  auto reduced = [&](int a) {
    const auto aa = static_cast<std::size_t>(a);
    return state_[aa] * (cost_[aa] + pi_[static_cast<std::size_t>(source_[aa])] -
                         pi_[static_cast<std::size_t>(target_[aa])]);
  };
  for (int scanned = 0; scanned < arc_num_; ++scanned) {
    const std::int64_t c = reduced(e);
    if (c < best) {
      best = c;
      in_arc_ = e;
    }
    if (++e == arc_num_) e = 0;
    if (--cnt == 0) {
      if (best < 0) break;
      cnt = block_size_;
    }
  }
  if (best >= 0) return false;
  next_arc_ = e;
  return true;
}

void NetworkSimplex::find_join_node() {
  int u = source_[static_cast<std::size_t>(in_arc_)];
  int v = target_[static_cast<std::size_t>(in_arc_)];
  while (u != v) {
    if (succ_num_[static_cast<std::size_t>(u)] < succ_num_[static_cast<std::size_t>(v)]) {
      u = parent_[static_cast<std::size_t>(u)];
    } else {
      v = parent_[static_cast<std::size_t>(v)];
    }
  }
  join_ = u;
}

// Ratio test along the cycle. The first side uses a strict comparison and the
// second a non-strict one, which selects the last blocking arc in cycle order
// and keeps the tree strongly feasible.
bool NetworkSimplex::find_leaving_arc() {
  const auto in = static_cast<std::size_t>(in_arc_);
  int first, second;
  if (state_[in] == kLower) {
    first = source_[in];
    second = target_[in];
  } else {
    first = target_[in];
    second = source_[in];
  }
  delta_ = kInf;
  int result = 0;
  for (int u = first; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
    const auto uu = static_cast<std::size_t>(u);
    const double d = pred_dir_[uu] == kUp ? flow_[static_cast<std::size_t>(pred_[uu])] : kInf;
    if (d < delta_) {
      delta_ = d;
      u_out_ = u;
      result = 1;
    }
  }
  for (int u = second; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
    const auto uu = static_cast<std::size_t>(u);
    const double d = pred_dir_[uu] == kDown ? flow_[static_cast<std::size_t>(pred_[uu])] : kInf;
    if (d <= delta_) {
      delta_ = d;
      u_out_ = u;
      result = 2;
    }
  }
  if (result == 1) {
    u_in_ = first;
    v_in_ = second;
  } else {
    u_in_ = second;
    v_in_ = first;
  }
  return result != 0;
}

void NetworkSimplex::change_flow() {
  const auto in = static_cast<std::size_t>(in_arc_);
  if (delta_ > 0.0) {
    const double val = state_[in] * delta_;
    flow_[in] += val;
    for (int u = source_[in]; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
      const auto uu = static_cast<std::size_t>(u);
      flow_[static_cast<std::size_t>(pred_[uu])] -= pred_dir_[uu] * val;
    }
    for (int u = target_[in]; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
      const auto uu = static_cast<std::size_t>(u);
      flow_[static_cast<std::size_t>(pred_[uu])] += pred_dir_[uu] * val;
    }
  }
  state_[in] = kTree;
  const auto out = static_cast<std::size_t>(pred_[static_cast<std::size_t>(u_out_)]);
  flow_[out] = 0.0;
  state_[out] = kLower;
}

void NetworkSimplex::update_tree_structure() {
  auto& parent = parent_;
  auto& thread = thread_;
  auto& rev = rev_thread_;
  auto& last_succ = last_succ_;
  auto& succ_num = succ_num_;
  auto at = [](int i) { return static_cast<std::size_t>(i); };

  const int old_rev_thread = rev[at(u_out_)];
  const int old_succ_num = succ_num[at(u_out_)];
  const int old_last_succ = last_succ[at(u_out_)];
  v_out_ = parent[at(u_out_)];

  if (u_in_ == u_out_) {
    parent[at(u_in_)] = v_in_;
    pred_[at(u_in_)] = in_arc_;
    pred_dir_[at(u_in_)] = u_in_ == source_[at(in_arc_)] ? kUp : kDown;

    if (thread[at(v_in_)] != u_out_) {
      int after = thread[at(old_last_succ)];
      thread[at(old_rev_thread)] = after;
      rev[at(after)] = old_rev_thread;
      after = thread[at(v_in_)];
      thread[at(v_in_)] = u_out_;
      rev[at(u_out_)] = v_in_;
      thread[at(old_last_succ)] = after;
      rev[at(after)] = old_last_succ;
    }
  } else {
    // When old_rev_thread is v_in, join and v_out coincide.
    const int thread_continue =
        old_rev_thread == v_in_ ? thread[at(old_last_succ)] : thread[at(v_in_)];

    // Reverse the stem between u_in and u_out, relinking the thread list.
    int stem = u_in_;
    int par_stem = v_in_;
    int last = last_succ[at(u_in_)];
    int after = thread[at(last)];
    thread[at(v_in_)] = u_in_;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    while (stem != u_out_) {
      const int next_stem = parent[at(stem)];
      thread[at(last)] = next_stem;
      dirty_revs_.push_back(last);

      const int before = rev[at(stem)];
      thread[at(before)] = after;
      rev[at(after)] = before;

      parent[at(stem)] = par_stem;
      par_stem = stem;
      stem = next_stem;

      last = last_succ[at(stem)] == last_succ[at(par_stem)] ? rev[at(par_stem)]
                                                            : last_succ[at(stem)];
      after = thread[at(last)];
    }
    parent[at(u_out_)] = par_stem;
    thread[at(last)] = thread_continue;
    rev[at(thread_continue)] = last;
    last_succ[at(u_out_)] = last;

    if (old_rev_thread != v_in_) {
      thread[at(old_rev_thread)] = after;
      rev[at(after)] = old_rev_thread;
    }

    for (int u : dirty_revs_) rev[at(thread[at(u)])] = u;

    int tmp_sc = 0;
    const int tmp_ls = last_succ[at(u_out_)];
    for (int u = u_out_, p = parent[at(u)]; u != u_in_; u = p, p = parent[at(u)]) {
      pred_[at(u)] = pred_[at(p)];
      pred_dir_[at(u)] = -pred_dir_[at(p)];
      tmp_sc += succ_num[at(u)] - succ_num[at(p)];
      succ_num[at(u)] = tmp_sc;
      last_succ[at(p)] = tmp_ls;
    }
    pred_[at(u_in_)] = in_arc_;
    pred_dir_[at(u_in_)] = u_in_ == source_[at(in_arc_)] ? kUp : kDown;
    succ_num[at(u_in_)] = old_succ_num;
  }

  const int up_limit_out = last_succ[at(join_)] == v_in_ ? join_ : -1;
  const int last_succ_out = last_succ[at(u_out_)];
  for (int u = v_in_; u != -1 && last_succ[at(u)] == v_in_; u = parent[at(u)]) {
    last_succ[at(u)] = last_succ_out;
  }

  if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
    for (int u = v_out_; u != up_limit_out && last_succ[at(u)] == old_last_succ; u = parent[at(u)]) {
      last_succ[at(u)] = old_rev_thread;
    }
  } else if (last_succ_out != old_last_succ) {
    for (int u = v_out_; u != up_limit_out && last_succ[at(u)] == old_last_succ; u = parent[at(u)]) {
      last_succ[at(u)] = last_succ_out;
    }
  }

  for (int u = v_in_; u != join_; u = parent[at(u)]) succ_num[at(u)] += old_succ_num;
  for (int u = v_out_; u != join_; u = parent[at(u)]) succ_num[at(u)] -= old_succ_num;
}

void NetworkSimplex::update_potential() {
  const auto ui = static_cast<std::size_t>(u_in_);
  const std::int64_t sigma = pi_[static_cast<std::size_t>(v_in_)] - pi_[ui] -
                             pred_dir_[ui] * cost_[static_cast<std::size_t>(in_arc_)];
  const int end = thread_[static_cast<std::size_t>(last_succ_[ui])];
  for (int u = u_in_; u != end; u = thread_[static_cast<std::size_t>(u)]) {
    pi_[static_cast<std::size_t>(u)] += sigma;
  }
}

bool NetworkSimplex::run(std::uint64_t max_pivots) {
  while (find_entering_arc()) {
    if (++pivots_ > max_pivots) {
      throw NotConverged("network simplex exceeded its pivot limit", pivots_, 0.0);
    }
    find_join_node();
    if (!find_leaving_arc() || delta_ == kInf) {
      throw Error(ErrorCode::kDegenerateInput, "min-cost flow problem is unbounded");
    }
    change_flow();
    update_tree_structure();
    update_potential();
  }
  double stray = 0.0, scale = 0.0;
  for (int u = 0; u < node_num_; ++u) {
    stray += flow_[static_cast<std::size_t>(arc_num_ + u)];
    scale += std::abs(supply_[static_cast<std::size_t>(u)]);
  }
  return stray <= 1e-9 * std::max(1.0, scale);
}

}  // namespace tsel::ot::detail
