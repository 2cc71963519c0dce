#include "sga/errors.hpp"
#include "sga/scene_graph.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <set>

using namespace sga;

namespace {

Node make_node(NodeId id, Eigen::Vector3d pos, FeatureDims dims = {4, 3}) {
  Node n;
  n.id = id;
  n.position = pos;
  n.features.vl = Eigen::VectorXd::Ones(dims.vl).normalized();
  n.features.t = Eigen::VectorXd::Ones(dims.t).normalized();
  n.features.geo = {0.5, 0.5, 0.5};
  return n;
}

std::set<std::pair<NodeId, NodeId>> edge_pairs(const std::vector<Edge>& edges) {
  std::set<std::pair<NodeId, NodeId>> out;
  for (const auto& e : edges) out.emplace(e.i, e.j);
  return out;
}

// O(n^2) oracle: each node selects its n_max nearest within d_th.
std::set<std::pair<NodeId, NodeId>> knn_oracle(const std::vector<Node>& nodes, int n_max,
                                               double d_th) {
  std::set<std::pair<NodeId, NodeId>> out;
  for (const auto& a : nodes) {
    std::vector<std::pair<double, NodeId>> c;
    for (const auto& b : nodes) {
      if (b.id == a.id) continue;
      const Eigen::Vector3d diff = a.position - b.position;
      const double d = std::sqrt(diff.x() * diff.x() + diff.y() * diff.y() + diff.z() * diff.z());
      if (d <= d_th) c.emplace_back(d, b.id);
    }
    std::sort(c.begin(), c.end());
    for (std::size_t r = 0; r < c.size() && r < static_cast<std::size_t>(n_max); ++r) {
      out.emplace(std::min(a.id, c[r].second), std::max(a.id, c[r].second));
    }
  }
  return out;
}

}  // namespace

TEST(PairwiseDistance, Basics) {
  EXPECT_EQ(pairwise_distance({0, 0, 0}, {0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(pairwise_distance({0, 0, 0}, {3, 4, 0}), 5.0);
}

TEST(PairwiseDistance, MatchesSumOfSquares) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector3d a = test::random_matrix(rng, 3, 1, -10, 10);
    const Eigen::Vector3d b = test::random_matrix(rng, 3, 1, -10, 10);
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
    EXPECT_NEAR(pairwise_distance(a, b), std::sqrt(s), 1e-12);
    EXPECT_EQ(pairwise_distance(a, b), pairwise_distance(b, a));
  }
}

TEST(PairwiseDistance, RejectsNonFinite) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(pairwise_distance({nan, 0, 0}, {0, 0, 0}), InvalidInput);
  EXPECT_THROW(pairwise_distance({0, 0, 0}, {0, std::numeric_limits<double>::infinity(), 0}),
               InvalidInput);
}

TEST(BuildEdges, EmptyAndSingle) {
  EXPECT_TRUE(build_edges(std::vector<Node>{}, {}).empty());
  std::vector<Node> one{make_node(0, {0, 0, 0})};
  EXPECT_TRUE(build_edges(one, {}).empty());
}

TEST(BuildEdges, ThresholdExcludesFarNode) {
  std::vector<Node> nodes{make_node(0, {0, 0, 0}), make_node(1, {1, 0, 0}),
                          make_node(2, {10, 0, 0})};
  const auto edges = build_edges(nodes, {4, 2.0});
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0], (Edge{0, 1, 1.0}));
}

TEST(BuildEdges, RejectsBadParams) {
  std::vector<Node> nodes{make_node(0, {0, 0, 0})};
  EXPECT_THROW(build_edges(nodes, {0, 2.0}), InvalidParameter);
  EXPECT_THROW(build_edges(nodes, {4, 0.0}), InvalidParameter);
}

TEST(BuildEdges, TiesGoToLowerId) {
  // Node 0 at the origin, three neighbors at distance 1; n_max = 2.
  std::vector<Node> nodes{make_node(5, {0, 0, 0}), make_node(9, {1, 0, 0}),
                          make_node(3, {0, 1, 0}), make_node(7, {0, 0, 1})};
  const auto edges = build_edges(nodes, {2, 1.2});
  // From node 5: ids 3 and 7 win the tie. Other nodes are sqrt(2) apart,
  // beyond d_th, so they only select node 5.
  EXPECT_EQ(edge_pairs(edges), (std::set<std::pair<NodeId, NodeId>>{{3, 5}, {5, 7}, {5, 9}}));
}

TEST(BuildEdges, MatchesBruteForceOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = test::random_graph(rng, 50, {4, 3}, 6.0);
    for (const int n_max : {1, 2, 4, 7}) {
      const auto edges = build_edges(g.nodes, {n_max, 2.0});
      EXPECT_EQ(edge_pairs(edges), knn_oracle(g.nodes, n_max, 2.0));
      for (const auto& e : edges) {
        EXPECT_LT(e.i, e.j);
        const double d = pairwise_distance(g.nodes[*g.index_of(e.i)].position,
                                           g.nodes[*g.index_of(e.j)].position);
        EXPECT_NEAR(e.d, d, 1e-9 * std::max(1.0, d));
      }
      EXPECT_TRUE(std::is_sorted(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
        return std::tie(x.i, x.j) < std::tie(y.i, y.j);
      }));
    }
  }
}

TEST(BuildEdges, RigidInvariance) {
  std::mt19937_64 rng(11);
  auto g = test::random_graph(rng, 30, {4, 3}, 5.0);
  const auto base = edge_pairs(g.edges);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Matrix3d R = test::random_rotation(rng);
    const Eigen::Vector3d t = test::random_matrix(rng, 3, 1, -50, 50);
    auto h = g;
    for (auto& n : h.nodes) n.position = R * n.position + t;
    rebuild_edges(h, {});
    EXPECT_EQ(edge_pairs(h.edges), base);
  }
}

TEST(BuildEdges, RelabelingEquivariance) {
  std::mt19937_64 rng(12);
  auto g = test::random_graph(rng, 25, {4, 3}, 4.0);
  // Relabel id -> 100 - 3 id and shuffle node order.
  auto h = g;
  for (auto& n : h.nodes) n.id = 100 - 3 * n.id;
  std::shuffle(h.nodes.begin(), h.nodes.end(), rng);
  rebuild_edges(h, {});
  std::set<std::pair<NodeId, NodeId>> expect;
  for (const auto& e : g.edges) {
    const NodeId a = 100 - 3 * e.i, b = 100 - 3 * e.j;
    expect.emplace(std::min(a, b), std::max(a, b));
  }
  EXPECT_EQ(edge_pairs(h.edges), expect);
}

TEST(Adjacency, SortedByDistanceThenId) {
  std::mt19937_64 rng(3);
  auto g = test::random_graph(rng, 20, {4, 3});
  const auto adj = adjacency(g);
  std::size_t total = 0;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    for (std::size_t a = 1; a < adj[i].size(); ++a) EXPECT_LE(adj[i][a - 1].d, adj[i][a].d);
    total += adj[i].size();
  }
  EXPECT_EQ(total, 2 * g.edges.size());
}

TEST(Adjacency, UnknownEndpointThrows) {
  SceneGraph g;
  g.nodes = {make_node(0, {0, 0, 0})};
  g.edges = {{0, 4, 1.0}};
  EXPECT_THROW(adjacency(g), InvalidInput);
}

TEST(ValidateGraph, WellFormed) {
  std::mt19937_64 rng(5);
  auto g = test::random_graph(rng, 5, {4, 3});
  EXPECT_TRUE(validate_graph(g).empty());
}

TEST(ValidateGraph, DuplicateId) {
  std::mt19937_64 rng(5);
  auto g = test::random_graph(rng, 5, {4, 3});
  g.edges.clear();
  g.nodes[1].id = 3;
  const auto v = validate_graph(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("duplicate"), std::string::npos);
}

TEST(ValidateGraph, StaleDistance) {
  SceneGraph g;
  g.feature_dims = {4, 3};
  g.nodes = {make_node(0, {0, 0, 0}), make_node(1, {2, 0, 0})};
  g.edges = {{0, 1, 1.0}};
  const auto v = validate_graph(g);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("stale"), std::string::npos);
  g.edges = {{0, 1, 2.0 * (1 + 1e-12)}};
  EXPECT_TRUE(validate_graph(g).empty());
}

TEST(ValidateGraph, OtherViolations) {
  SceneGraph g;
  g.feature_dims = {4, 3};
  g.nodes = {make_node(0, {0, 0, 0}), make_node(1, {1, 0, 0}), make_node(2, {0, 1, 0})};
  g.nodes[0].features.vl = Eigen::VectorXd::Ones(5);  // dimension mismatch
  g.nodes[1].features.geo = {0.0, 0.5, 0.5};          // f_g outside (0, 1]
  g.nodes[2].features.t[0] = std::numeric_limits<double>::quiet_NaN();
  g.edges = {{0, 9, 1.0}, {1, 0, 1.0}};  // dangling, non-canonical
  EXPECT_EQ(validate_graph(g).size(), 5u);
}

TEST(GroundTruth, OneToManyRejected) {
  SceneGraph a, b;
  a.nodes = {make_node(0, {0, 0, 0}), make_node(1, {1, 0, 0})};
  b.nodes = {make_node(10, {0, 0, 0}), make_node(11, {1, 0, 0})};
  GroundTruthMap many_to_one{{{0, 10}, {1, 10}}};
  EXPECT_TRUE(validate_ground_truth(many_to_one, a, b).empty());
  GroundTruthMap one_to_many{{{0, 10}, {0, 11}}};
  EXPECT_EQ(validate_ground_truth(one_to_many, a, b).size(), 1u);
  GroundTruthMap unknown{{{0, 12}}};
  EXPECT_EQ(validate_ground_truth(unknown, a, b).size(), 1u);
  EXPECT_EQ(gt_index_pairs(many_to_one, a, b), (std::vector<std::pair<int, int>>{{0, 0}, {1, 0}}));
}

TEST(FrameKind, StringRoundTrip) {
  for (auto k : {FrameKind::camera, FrameKind::world}) {
    EXPECT_EQ(frame_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(frame_kind_from_string("sideways"), InvalidInput);
}
