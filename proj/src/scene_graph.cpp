#include "sga/scene_graph.hpp"

#include "sga/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace sga {

namespace {

bool all_finite(const Eigen::Ref<const Eigen::VectorXd>& v) { return v.allFinite(); }

std::string node_tag(const Node& n) { return "node " + std::to_string(n.id); }

}  // namespace

std::optional<std::size_t> SceneGraph::index_of(NodeId id) const {
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (nodes[k].id == id) return k;
  }
  return std::nullopt;
}

std::vector<Eigen::Vector3d> SceneGraph::positions() const {
  std::vector<Eigen::Vector3d> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(n.position);
  return out;
}

double pairwise_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  if (!a.allFinite() || !b.allFinite()) {
    throw InvalidInput("pairwise_distance: non-finite coordinate");
  }
  return (a - b).norm();
}

std::vector<Edge> build_edges(std::span<const Node> nodes, const EdgeParams& params) {
  if (params.n_max < 1) throw InvalidParameter("build_edges: n_max must be >= 1");
  if (!(params.d_th > 0.0)) throw InvalidParameter("build_edges: d_th must be > 0");

  const std::size_t n = nodes.size();
  std::set<std::pair<std::size_t, std::size_t>> selected;  // index pairs, lo < hi
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    cand.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = pairwise_distance(nodes[i].position, nodes[j].position);
      if (d <= params.d_th) cand.emplace_back(d, j);
    }
    std::sort(cand.begin(), cand.end(), [&](const auto& x, const auto& y) {
      if (x.first != y.first) return x.first < y.first;
      return nodes[x.second].id < nodes[y.second].id;
    });
    const std::size_t take = std::min<std::size_t>(cand.size(), params.n_max);
    for (std::size_t r = 0; r < take; ++r) {
      const std::size_t j = cand[r].second;
      selected.emplace(std::min(i, j), std::max(i, j));
    }
  }

  std::vector<Edge> edges;
  edges.reserve(selected.size());
  for (const auto& [a, b] : selected) {
    Edge e{nodes[a].id, nodes[b].id, 0.0};
    if (e.i > e.j) std::swap(e.i, e.j);
    e.d = pairwise_distance(nodes[a].position, nodes[b].position);
    edges.push_back(e);
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
  return edges;
}

void rebuild_edges(SceneGraph& g, const EdgeParams& params) {
  g.edges = build_edges(g.nodes, params);
}

std::vector<std::vector<Neighbor>> adjacency(const SceneGraph& g) {
  std::unordered_map<NodeId, std::size_t> index;
  index.reserve(g.nodes.size());
  for (std::size_t k = 0; k < g.nodes.size(); ++k) index.emplace(g.nodes[k].id, k);

  std::vector<std::vector<Neighbor>> adj(g.nodes.size());
  for (const auto& e : g.edges) {
    auto a = index.find(e.i);
    auto b = index.find(e.j);
    if (a == index.end() || b == index.end()) {
      throw InvalidInput("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                         ") references an unknown node");
    }
    if (a->second == b->second) continue;
    adj[a->second].push_back({b->second, e.d});
    adj[b->second].push_back({a->second, e.d});
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end(), [&](const Neighbor& x, const Neighbor& y) {
      if (x.d != y.d) return x.d < y.d;
      return g.nodes[x.index].id < g.nodes[y.index].id;
    });
    list.erase(std::unique(list.begin(), list.end(),
                           [](const Neighbor& x, const Neighbor& y) { return x.index == y.index; }),
               list.end());
  }
  return adj;
}

std::vector<std::string> validate_graph(const SceneGraph& g) {
  std::vector<std::string> out;
  std::unordered_map<NodeId, std::size_t> index;
  std::unordered_set<NodeId> reported;

  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    const Node& n = g.nodes[k];
    if (n.id < 0) out.push_back(node_tag(n) + ": negative id");
    if (!index.emplace(n.id, k).second && reported.insert(n.id).second) {
      out.push_back("duplicate node id " + std::to_string(n.id));
    }
    if (!n.position.allFinite()) out.push_back(node_tag(n) + ": non-finite position");
    const auto& f = n.features;
    if (f.vl.size() != g.feature_dims.vl) {
      out.push_back(node_tag(n) + ": f_vl has dimension " + std::to_string(f.vl.size()) +
                    ", expected " + std::to_string(g.feature_dims.vl));
    } else if (!all_finite(f.vl)) {
      out.push_back(node_tag(n) + ": non-finite f_vl");
    }
    if (f.t.size() != g.feature_dims.t) {
      out.push_back(node_tag(n) + ": f_t has dimension " + std::to_string(f.t.size()) +
                    ", expected " + std::to_string(g.feature_dims.t));
    } else if (!all_finite(f.t)) {
      out.push_back(node_tag(n) + ": non-finite f_t");
    }
    if (!f.geo.allFinite()) {
      out.push_back(node_tag(n) + ": non-finite f_g");
    } else if ((f.geo.array() <= 0.0).any() || (f.geo.array() > 1.0).any()) {
      out.push_back(node_tag(n) + ": f_g components must lie in (0, 1]");
    }
  }

  for (const auto& e : g.edges) {
    const std::string tag = "edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) + ")";
    auto a = index.find(e.i);
    auto b = index.find(e.j);
    if (a == index.end() || b == index.end()) {
      out.push_back(tag + ": dangling endpoint");
      continue;
    }
    if (e.i == e.j) {
      out.push_back(tag + ": self loop");
      continue;
    }
    if (e.i > e.j) out.push_back(tag + ": not in canonical i < j order");
    if (!std::isfinite(e.d) || e.d < 0.0) {
      out.push_back(tag + ": invalid distance");
      continue;
    }
    const auto& pa = g.nodes[a->second].position;
    const auto& pb = g.nodes[b->second].position;
    if (!pa.allFinite() || !pb.allFinite()) continue;
    const double actual = (pa - pb).norm();
    if (std::abs(e.d - actual) > 1e-9 * std::max(1.0, actual)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << tag << ": stale distance " << e.d << " (actual " << actual << ")";
      out.push_back(msg.str());
    }
  }
  return out;
}

std::vector<std::string> validate_ground_truth(const GroundTruthMap& gt, const SceneGraph& a,
                                               const SceneGraph& b) {
  std::vector<std::string> out;
  std::unordered_set<NodeId> seen;
  for (const auto& [ia, ib] : gt.pairs) {
    if (!a.index_of(ia)) out.push_back("gt pair references unknown A node " + std::to_string(ia));
    if (!b.index_of(ib)) out.push_back("gt pair references unknown B node " + std::to_string(ib));
    if (!seen.insert(ia).second) {
      out.push_back("A node " + std::to_string(ia) + " appears in more than one gt pair");
    }
  }
  return out;
}

std::vector<std::pair<int, int>> gt_index_pairs(const GroundTruthMap& gt, const SceneGraph& a,
                                                const SceneGraph& b) {
  std::vector<std::pair<int, int>> out;
  out.reserve(gt.pairs.size());
  for (const auto& [ia, ib] : gt.pairs) {
    auto x = a.index_of(ia);
    auto y = b.index_of(ib);
    if (!x || !y) throw InvalidInput("ground truth references an unknown node id");
    out.emplace_back(static_cast<int>(*x), static_cast<int>(*y));
  }
  return out;
}

std::string to_string(FrameKind kind) { return kind == FrameKind::camera ? "camera" : "world"; }

FrameKind frame_kind_from_string(const std::string& s) {
  if (s == "camera") return FrameKind::camera;
  if (s == "world") return FrameKind::world;
  throw InvalidInput("unknown frame_kind '" + s + "'");
}

}  // namespace sga
