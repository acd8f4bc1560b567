#pragma once

#include <cstdint>
#include <vector>

namespace w2lab {

// Primal network simplex for uncapacitated bipartite transportation problems, with
// a strongly feasible spanning tree and block-search pricing. Arcs may be added
// between solves; the current basis stays feasible and pivoting resumes from it.
class NetworkSimplex {
 public:
  enum class Status { Optimal, IterationLimit };

  // cost_bound must dominate every arc cost that will ever be added.
  NetworkSimplex(const std::vector<double>& supply, const std::vector<double>& demand,
                 double cost_bound);

  int add_arc(int source, int target, double cost);
  Status solve(std::int64_t max_pivots = -1);

  std::size_t arc_count() const { return src_.size() - first_real_; }
  int arc_source(int arc) const { return src_[first_real_ + arc]; }
  int arc_target(int arc) const { return tgt_[first_real_ + arc] - n_src_; }
  double arc_cost(int arc) const { return cost_[first_real_ + arc]; }
  double arc_flow(int arc) const { return flow_[first_real_ + arc]; }

  // Duals with cost(i, j) - u_i - v_j >= 0 on every arc.
  double source_dual(int i) const { return -pi_[i]; }
  double target_dual(int j) const { return pi_[n_src_ + j]; }
  // Reduced cost of a prospective arc.
  double reduced_cost(int i, int j, double cost) const { return cost + pi_[i] - pi_[n_src_ + j]; }

  double artificial_flow() const;
  double optimality_tolerance() const { return eps_; }
  std::int64_t pivots() const { return pivots_; }

 private:
  enum : std::int8_t { kTree = 0, kLower = 1 };

  bool find_entering(int& arc);
  int find_join(int u, int v) const;
  void pivot(int in_arc);
  void add_child(int parent, int child);
  void remove_child(int parent, int child);
  void recompute_potentials();
  void shift_potentials();

  int n_src_ = 0;
  int n_nodes_ = 0;  // excluding the root
  int root_ = 0;
  std::size_t first_real_ = 0;
  double art_cost_ = 0.0;
  double eps_ = 0.0;

  std::vector<int> src_, tgt_;
  std::vector<double> cost_, flow_;
  std::vector<std::int8_t> state_;

  std::vector<int> parent_, pred_, depth_, first_child_, next_sib_, prev_sib_;
  std::vector<char> pred_up_;
  std::vector<double> pi_;

  std::size_t next_arc_ = 0;
  std::int64_t pivots_ = 0;
  std::int64_t since_refresh_ = 0;
  std::vector<int> path_, stack_;
};

}  // namespace w2lab
