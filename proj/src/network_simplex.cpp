#include "w2lab/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "w2lab/common.hpp"

namespace w2lab {

NetworkSimplex::NetworkSimplex(const std::vector<double>& supply, const std::vector<double>& demand,
                               double cost_bound) {
  n_src_ = static_cast<int>(supply.size());
  n_nodes_ = n_src_ + static_cast<int>(demand.size());
  root_ = n_nodes_;
  const int total = n_nodes_ + 1;
  art_cost_ = (std::max(cost_bound, 0.0) + 1.0) * static_cast<double>(total);
  eps_ = 16.0 * std::numeric_limits<double>::epsilon() * art_cost_;

  parent_.assign(total, -1);
  pred_.assign(total, -1);
  depth_.assign(total, 0);
  first_child_.assign(total, -1);
  next_sib_.assign(total, -1);
  prev_sib_.assign(total, -1);
  pred_up_.assign(total, 0);
  pi_.assign(total, 0.0);

  src_.reserve(static_cast<std::size_t>(n_nodes_) * 4);
  for (int u = 0; u < n_nodes_; ++u) {
    double b = u < n_src_ ? supply[u] : -demand[u - n_src_];
    int arc = static_cast<int>(src_.size());
    if (b > 0.0) {
      src_.push_back(u);
      tgt_.push_back(root_);
      flow_.push_back(b);
      pred_up_[u] = 1;
      pi_[u] = -art_cost_;
    } else {
      src_.push_back(root_);
      tgt_.push_back(u);
      flow_.push_back(-b);
      pred_up_[u] = 0;
      pi_[u] = art_cost_;
    }
    cost_.push_back(art_cost_);
    state_.push_back(kTree);
    parent_[u] = root_;
    pred_[u] = arc;
    depth_[u] = 1;
    add_child(root_, u);
  }
  first_real_ = src_.size();
}

int NetworkSimplex::add_arc(int source, int target, double cost) {
  src_.push_back(source);
  tgt_.push_back(n_src_ + target);
  cost_.push_back(cost);
  flow_.push_back(0.0);
  state_.push_back(kLower);
  return static_cast<int>(src_.size() - first_real_ - 1);
}

void NetworkSimplex::add_child(int parent, int child) {
  int head = first_child_[parent];
  next_sib_[child] = head;
  prev_sib_[child] = -1;
  if (head != -1) prev_sib_[head] = child;
  first_child_[parent] = child;
}

void NetworkSimplex::remove_child(int parent, int child) {
  int p = prev_sib_[child];
  int n = next_sib_[child];
  if (p != -1) {
    next_sib_[p] = n;
  } else {
    first_child_[parent] = n;
  }
  if (n != -1) prev_sib_[n] = p;
  prev_sib_[child] = next_sib_[child] = -1;
}

bool NetworkSimplex::find_entering(int& arc) {
  const std::size_t m = src_.size();
  const std::size_t block = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(m))));
  double best = -eps_;
  int best_arc = -1;
  std::size_t cnt = block;
  if (next_arc_ >= m) next_arc_ = 0;
  std::size_t e = next_arc_;
  for (std::size_t visited = 0; visited < m; ++visited) {
    if (state_[e] == kLower) {
      double rc = cost_[e] + pi_[src_[e]] - pi_[tgt_[e]];
      if (rc < best) {
        best = rc;
        best_arc = static_cast<int>(e);
      }
    }
    if (++e == m) e = 0;
    if (--cnt == 0) {
      if (best_arc != -1) {
        next_arc_ = e;
        arc = best_arc;
        return true;
      }
      cnt = block;
    }
  }
  if (best_arc != -1) {
    next_arc_ = e;
    arc = best_arc;
    return true;
  }
  return false;
}

int NetworkSimplex::find_join(int u, int v) const {
  while (u != v) {
    if (depth_[u] > depth_[v]) {
      u = parent_[u];
    } else if (depth_[v] > depth_[u]) {
      v = parent_[v];
    } else {
      u = parent_[u];
      v = parent_[v];
    }
  }
  return u;
}

void NetworkSimplex::pivot(int in_arc) {
  const int first = src_[in_arc];
  const int second = tgt_[in_arc];
  const int join = find_join(first, second);
  const double inf = std::numeric_limits<double>::infinity();

  double delta = inf;
  int u_out = -1;
  int result = 0;
  for (int u = first; u != join; u = parent_[u]) {
    double d = pred_up_[u] ? flow_[pred_[u]] : inf;
    if (d < delta) {
      delta = d;
      u_out = u;
      result = 1;
    }
  }
  for (int u = second; u != join; u = parent_[u]) {
    double d = pred_up_[u] ? inf : flow_[pred_[u]];
    if (d <= delta) {
      delta = d;
      u_out = u;
      result = 2;
    }
  }
  if (result == 0) throw Error(ErrorCode::Infeasible, "unbounded pivot in transport solver");

  if (delta > 0.0) {
    flow_[in_arc] += delta;
    for (int u = first; u != join; u = parent_[u]) {
      flow_[pred_[u]] += pred_up_[u] ? -delta : delta;
    }
    for (int u = second; u != join; u = parent_[u]) {
      flow_[pred_[u]] += pred_up_[u] ? delta : -delta;
    }
  }
  const int out_arc = pred_[u_out];
  flow_[out_arc] = 0.0;
  state_[out_arc] = kLower;
  state_[in_arc] = kTree;

  const int u_in = result == 1 ? first : second;
  const int v_in = result == 1 ? second : first;

  // Re-root the detached subtree at u_in by reversing the path u_in .. u_out.
  path_.clear();
  for (int u = u_in;; u = parent_[u]) {
    path_.push_back(u);
    if (u == u_out) break;
  }
  remove_child(parent_[u_out], u_out);
  const std::size_t k = path_.size() - 1;
  for (std::size_t i = 1; i <= k; ++i) remove_child(path_[i], path_[i - 1]);
  for (std::size_t i = k; i >= 1; --i) {
    const int node = path_[i];
    const int below = path_[i - 1];
    pred_[node] = pred_[below];
    pred_up_[node] = pred_up_[below] ? 0 : 1;
    parent_[node] = below;
    add_child(below, node);
  }
  parent_[u_in] = v_in;
  pred_[u_in] = in_arc;
  pred_up_[u_in] = src_[in_arc] == u_in ? 1 : 0;
  add_child(v_in, u_in);

  const double target = pred_up_[u_in] ? pi_[v_in] - cost_[in_arc] : pi_[v_in] + cost_[in_arc];
  const double sigma = target - pi_[u_in];
  stack_.clear();
  stack_.push_back(u_in);
  while (!stack_.empty()) {
    int u = stack_.back();
    stack_.pop_back();
    pi_[u] += sigma;
    depth_[u] = depth_[parent_[u]] + 1;
    for (int c = first_child_[u]; c != -1; c = next_sib_[c]) stack_.push_back(c);
  }
}

void NetworkSimplex::recompute_potentials() {
  pi_[root_] = 0.0;
  depth_[root_] = 0;
  stack_.clear();
  for (int c = first_child_[root_]; c != -1; c = next_sib_[c]) stack_.push_back(c);
  while (!stack_.empty()) {
    int u = stack_.back();
    stack_.pop_back();
    int p = parent_[u];
    double c = cost_[pred_[u]];
    pi_[u] = pred_up_[u] ? pi_[p] - c : pi_[p] + c;
    depth_[u] = depth_[p] + 1;
    for (int ch = first_child_[u]; ch != -1; ch = next_sib_[ch]) stack_.push_back(ch);
  }
}

// Anchor at a real node so real potentials carry cost-scale magnitudes.
void NetworkSimplex::shift_potentials() {
  if (n_nodes_ == 0) return;
  double s = pi_[0];
  for (double& p : pi_) p -= s;
}

NetworkSimplex::Status NetworkSimplex::solve(std::int64_t max_pivots) {
  if (max_pivots < 0) {
    max_pivots = 1000 * static_cast<std::int64_t>(src_.size() + static_cast<std::size_t>(n_nodes_)) + 100000;
  }
  recompute_potentials();
  shift_potentials();
  const std::int64_t refresh_every = std::max<std::int64_t>(2 * n_nodes_, 1000);
  std::int64_t local = 0;
  int in_arc = -1;
  while (find_entering(in_arc)) {
    pivot(in_arc);
    ++pivots_;
    if (++since_refresh_ >= refresh_every) {
      recompute_potentials();
      shift_potentials();
      since_refresh_ = 0;
    }
    if (++local > max_pivots) return Status::IterationLimit;
  }
  recompute_potentials();
  shift_potentials();
  // Recomputation can expose arcs that drifted just below the threshold.
  while (find_entering(in_arc)) {
    pivot(in_arc);
    ++pivots_;
    if (++local > max_pivots) return Status::IterationLimit;
    if (++since_refresh_ >= refresh_every) {
      recompute_potentials();
      shift_potentials();
      since_refresh_ = 0;
    }
  }
  recompute_potentials();
  shift_potentials();
  return Status::Optimal;
}

double NetworkSimplex::artificial_flow() const {
  double s = 0.0;
  for (std::size_t e = 0; e < first_real_; ++e) s += flow_[e];
  return s;
}

}  // namespace w2lab
