#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sga {

using NodeId = std::int64_t;

struct FeatureDims {
  int vl = 256;
  int t = 384;

  bool operator==(const FeatureDims&) const = default;
};

struct NodeFeatures {
  Eigen::VectorXd vl;    // vision-language embedding
  Eigen::VectorXd t;     // text embedding
  Eigen::Vector3d geo;   // normalized bounding-box extents, each in (0, 1]
};

struct Node {
  NodeId id = 0;
  std::string label;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  NodeFeatures features;
  std::optional<NodeId> gt_instance;
};

// Undirected, stored once with i < j.
struct Edge {
  NodeId i = 0;
  NodeId j = 0;
  double d = 0.0;

  bool operator==(const Edge&) const = default;
};

enum class FrameKind { camera, world };

struct SceneGraph {
  std::string graph_id;
  FrameKind frame_kind = FrameKind::world;
  FeatureDims feature_dims;
  std::vector<Node> nodes;
  std::vector<Edge> edges;

  std::size_t size() const { return nodes.size(); }
  // Position of the node with the given id in `nodes`, or nullopt.
  std::optional<std::size_t> index_of(NodeId id) const;
  std::vector<Eigen::Vector3d> positions() const;
};

struct EdgeParams {
  int n_max = 4;
  double d_th = 2.0;
};

// Neighbor of a node, by index into SceneGraph::nodes.
struct Neighbor {
  std::size_t index;
  double d;
};

// Many-to-one allowed (repeated id_b), one-to-many never.
struct GroundTruthMap {
  std::vector<std::pair<NodeId, NodeId>> pairs;
};

double pairwise_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

// Directed k-NN within d_th, symmetrized by union, canonicalized (i < j),
// sorted by (i, j). Distance ties go to the lower node id.
std::vector<Edge> build_edges(std::span<const Node> nodes, const EdgeParams& params);

// Replaces g.edges with build_edges(g.nodes, params).
void rebuild_edges(SceneGraph& g, const EdgeParams& params);

// Neighbor lists by node index, each sorted by (d, neighbor id).
// Throws InvalidInput on edges that reference unknown ids.
std::vector<std::vector<Neighbor>> adjacency(const SceneGraph& g);

std::vector<std::string> validate_graph(const SceneGraph& g);

// Violations of the one-to-many rule or references to ids absent from a/b.
std::vector<std::string> validate_ground_truth(const GroundTruthMap& gt, const SceneGraph& a,
                                               const SceneGraph& b);

// gt pairs translated to (index in a, index in b).
std::vector<std::pair<int, int>> gt_index_pairs(const GroundTruthMap& gt, const SceneGraph& a,
                                                const SceneGraph& b);

std::string to_string(FrameKind kind);
FrameKind frame_kind_from_string(const std::string& s);

}  // namespace sga
