#include "sga/min_cost_flow.hpp"

#include "sga/errors.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

namespace sga {

namespace {
constexpr MinCostFlow::Cost kInf = std::numeric_limits<MinCostFlow::Cost>::max() / 4;
}

MinCostFlow::MinCostFlow(int num_nodes) : head_(static_cast<std::size_t>(num_nodes)) {
  if (num_nodes < 0) throw InvalidParameter("MinCostFlow: negative node count");
}

int MinCostFlow::add_arc(int from, int to, Capacity capacity, Cost cost) {
  const int n = num_nodes();
  if (from < 0 || from >= n || to < 0 || to >= n) {
    throw InvalidParameter("MinCostFlow::add_arc: node out of range");
  }
  if (capacity < 0) throw InvalidParameter("MinCostFlow::add_arc: negative capacity");
  const int fwd = static_cast<int>(arcs_.size());
  arcs_.push_back({to, fwd + 1, capacity, cost});
  arcs_.push_back({from, fwd, 0, -cost});
  head_[static_cast<std::size_t>(from)].push_back(fwd);
  head_[static_cast<std::size_t>(to)].push_back(fwd + 1);
  forward_arc_.push_back(fwd);
  original_cap_.push_back(capacity);
  return static_cast<int>(forward_arc_.size()) - 1;
}

MinCostFlow::Capacity MinCostFlow::flow(int arc) const {
  const auto k = static_cast<std::size_t>(arc);
  return original_cap_.at(k) - arcs_[static_cast<std::size_t>(forward_arc_[k])].cap;
}

bool MinCostFlow::bellman_ford(int source) {
  const int n = num_nodes();
  potential_.assign(static_cast<std::size_t>(n), kInf);
  potential_[static_cast<std::size_t>(source)] = 0;
  for (int round = 0; round < n; ++round) {
    bool changed = false;
    for (int u = 0; u < n; ++u) {
      const Cost pu = potential_[static_cast<std::size_t>(u)];
      if (pu == kInf) continue;
      for (int a : head_[static_cast<std::size_t>(u)]) {
        const Arc& e = arcs_[static_cast<std::size_t>(a)];
        if (e.cap > 0 && pu + e.cost < potential_[static_cast<std::size_t>(e.to)]) {
          potential_[static_cast<std::size_t>(e.to)] = pu + e.cost;
          changed = true;
        }
      }
    }
    if (!changed) return true;
  }
  return false;
}

MinCostFlow::Result MinCostFlow::solve(int source, int sink, Capacity limit) {
  const int n = num_nodes();
  if (source < 0 || source >= n || sink < 0 || sink >= n || source == sink) {
    throw InvalidParameter("MinCostFlow::solve: invalid source/sink");
  }
  if (!bellman_ford(source)) throw NumericError("MinCostFlow: negative cycle");
  for (auto& p : potential_) {
    if (p == kInf) p = 0;  // unreachable nodes stay unreachable
  }

  Result result;
  std::vector<Cost> dist(static_cast<std::size_t>(n));
  std::vector<int> prev_arc(static_cast<std::size_t>(n));
  using Item = std::pair<Cost, int>;
  while (result.flow < limit) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(prev_arc.begin(), prev_arc.end(), -1);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[static_cast<std::size_t>(source)] = 0;
    pq.emplace(0, source);
    while (!pq.empty()) {
      const auto [d, u] = pq.top();
      pq.pop();
      if (d != dist[static_cast<std::size_t>(u)]) continue;
      for (int a : head_[static_cast<std::size_t>(u)]) {
        const Arc& e = arcs_[static_cast<std::size_t>(a)];
        if (e.cap <= 0) continue;
        const Cost reduced = e.cost + potential_[static_cast<std::size_t>(u)] -
                             potential_[static_cast<std::size_t>(e.to)];
        const Cost nd = d + reduced;
        if (nd < dist[static_cast<std::size_t>(e.to)]) {
          dist[static_cast<std::size_t>(e.to)] = nd;
          prev_arc[static_cast<std::size_t>(e.to)] = a;
          pq.emplace(nd, e.to);
        }
      }
    }
    if (dist[static_cast<std::size_t>(sink)] == kInf) break;

    for (int v = 0; v < n; ++v) {
      if (dist[static_cast<std::size_t>(v)] != kInf) {
        potential_[static_cast<std::size_t>(v)] += dist[static_cast<std::size_t>(v)];
      }
    }

    Capacity push = limit - result.flow;
    for (int v = sink; v != source;) {
      const Arc& e = arcs_[static_cast<std::size_t>(prev_arc[static_cast<std::size_t>(v)])];
      push = std::min(push, e.cap);
      v = arcs_[static_cast<std::size_t>(e.rev)].to;
    }
    for (int v = sink; v != source;) {
      Arc& e = arcs_[static_cast<std::size_t>(prev_arc[static_cast<std::size_t>(v)])];
      e.cap -= push;
      arcs_[static_cast<std::size_t>(e.rev)].cap += push;
      result.cost += push * e.cost;
      v = arcs_[static_cast<std::size_t>(e.rev)].to;
    }
    result.flow += push;
  }
  return result;
}

}  // namespace sga
