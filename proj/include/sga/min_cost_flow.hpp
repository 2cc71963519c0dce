#pragma once

#include <cstdint>
#include <vector>

namespace sga {

// Successive shortest augmenting paths with Johnson potentials on integer
// costs. Initial potentials come from Bellman-Ford, so negative arc costs are
// allowed as long as there is no negative cycle. Dijkstra pops the smallest
// (distance, node) pair and relaxes arcs in insertion order, which makes the
// optimal flow returned for a given input fully reproducible.
class MinCostFlow {
 public:
  using Cost = std::int64_t;
  using Capacity = std::int64_t;

  explicit MinCostFlow(int num_nodes);

  // Returns the arc index used by flow().
  int add_arc(int from, int to, Capacity capacity, Cost cost);

  struct Result {
    Capacity flow = 0;
    Cost cost = 0;
  };

  // Pushes up to `limit` units from source to sink at minimum cost.
  Result solve(int source, int sink, Capacity limit);

  Capacity flow(int arc) const;
  int num_nodes() const { return static_cast<int>(head_.size()); }

 private:
  struct Arc {
    int to;
    int rev;  // index of the reverse arc in arcs_
    Capacity cap;
    Cost cost;
  };

  bool bellman_ford(int source);

  std::vector<std::vector<int>> head_;  // per-node outgoing arc indices
  std::vector<Arc> arcs_;
  std::vector<Capacity> original_cap_;  // by forward arc index
  std::vector<int> forward_arc_;        // user arc index -> arcs_ index
  std::vector<Cost> potential_;
};

}  // namespace sga
