#include "sga/errors.hpp"
#include "sga/eval.hpp"
#include "sga/pipeline.hpp"
#include "sga/synth.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace sga;

namespace {

SynthConfig quiet(std::uint64_t seed) {
  SynthConfig c;
  c.seed = seed;
  c.feature_noise_sigma = 0.0;
  c.position_noise_sigma = 0.0;
  c.undersegment_prob = 0.0;
  return c;
}

const Node& node(const SceneGraph& g, NodeId id) { return g.nodes[*g.index_of(id)]; }

void expect_bit_identical(const SceneGraph& a, const SceneGraph& b) {
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    EXPECT_EQ(a.nodes[k].position, b.nodes[k].position);
    EXPECT_EQ(a.nodes[k].features.vl, b.nodes[k].features.vl);
    EXPECT_EQ(a.nodes[k].features.t, b.nodes[k].features.t);
    EXPECT_EQ(a.nodes[k].features.geo, b.nodes[k].features.geo);
    EXPECT_EQ(a.nodes[k].gt_instance, b.nodes[k].gt_instance);
  }
  EXPECT_EQ(a.edges, b.edges);
}

}  // namespace

TEST(GenerateScene, SingleObject) {
  SynthConfig c;
  c.n_objects_min = c.n_objects_max = 1;
  const auto s = generate_scene(c);
  EXPECT_EQ(s.graph.size(), 1u);
  EXPECT_TRUE(s.graph.edges.empty());
}

TEST(GenerateScene, Deterministic) {
  SynthConfig c;
  c.seed = 42;
  expect_bit_identical(generate_scene(c).graph, generate_scene(c).graph);
  c.seed = 43;
  EXPECT_NE(generate_scene(c).graph.nodes[0].position, generate_scene(SynthConfig{}).graph.nodes[0].position);
}

TEST(GenerateScene, SeparationAndFeatureRanges) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    SynthConfig c;
    c.seed = seed;
    const auto s = generate_scene(c);
    const auto& n = s.graph.nodes;
    EXPECT_GE(n.size(), 8u);
    EXPECT_LE(n.size(), 30u);
    for (std::size_t i = 0; i < n.size(); ++i) {
      EXPECT_NEAR(n[i].features.vl.norm(), 1.0, 1e-12);
      EXPECT_GT(n[i].features.geo.minCoeff(), 0.0);
      EXPECT_LE(n[i].features.geo.maxCoeff(), 1.0);
      for (std::size_t j = i + 1; j < n.size(); ++j) {
        EXPECT_GE((n[i].position - n[j].position).norm(), c.min_separation);
      }
    }
    EXPECT_NO_THROW(validate_graph(s.graph));
  }
}

TEST(GenerateScene, Overcrowded) {
  SynthConfig c;
  c.n_objects_min = c.n_objects_max = 30;
  c.box_size = 0.5;
  c.box_height = 0.5;
  c.min_separation = 0.4;
  EXPECT_THROW(generate_scene(c), GenerationError);
  SynthConfig bad;
  bad.undersegment_prob = 1.5;
  EXPECT_THROW(generate_scene(bad), InvalidParameter);
}

TEST(F2S, WholeSceneViewIsIdentityMap) {
  auto c = quiet(3);
  c.f2s_view_radius = 100.0;
  const auto scene = generate_scene(c);
  const auto s = make_f2s_pair(scene, c, 7);
  EXPECT_EQ(s.graph_a.size(), scene.graph.size());
  EXPECT_EQ(s.gt.pairs.size(), scene.graph.size());
  for (const auto& [a, b] : s.gt.pairs) {
    EXPECT_EQ(*node(s.graph_a, a).gt_instance, b);
  }
  EXPECT_EQ(s.overlap_ratio, 1.0);
  EXPECT_EQ(s.graph_a.frame_kind, FrameKind::camera);
  // The recorded transform maps camera positions back onto the scene.
  for (const auto& n : s.graph_a.nodes) {
    const auto& obj = node(scene.graph, *n.gt_instance);
    EXPECT_LT((s.a_to_b->R * n.position + s.a_to_b->t - obj.position).norm(), 1e-9);
  }
}

TEST(F2S, ForcedSplitIsManyToOne) {
  auto c = quiet(4);
  c.n_objects_min = c.n_objects_max = 3;
  c.box_size = 30.0;
  c.f2s_view_radius = 0.5;
  c.min_separation = 5.0;
  c.undersegment_prob = 1.0;
  const auto scene = generate_scene(c);
  bool seen = false;
  for (std::uint64_t seed = 0; seed < 200 && !seen; ++seed) {
    AlignmentSample s;
    try {
      s = make_f2s_pair(scene, c, seed);
    } catch (const GenerationError&) {
      continue;
    }
    if (s.graph_a.size() != 2) continue;
    seen = true;
    ASSERT_EQ(s.gt.pairs.size(), 2u);
    EXPECT_EQ(s.gt.pairs[0].second, s.gt.pairs[1].second);
  }
  EXPECT_TRUE(seen);
}

TEST(F2S, OverlapRecountAndManyToOnePresence) {
  SynthConfig c;
  c.undersegment_prob = 0.3;
  std::size_t many_to_one = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    c.seed = seed;
    const auto scene = generate_scene(c);
    const auto s = make_f2s_pair(scene, c, seed + 100);
    std::size_t with_partner = 0;
    for (const auto& n : s.graph_a.nodes) with_partner += n.gt_instance.has_value();
    EXPECT_DOUBLE_EQ(s.overlap_ratio,
                     static_cast<double>(with_partner) / static_cast<double>(s.graph_a.size()));
    std::map<NodeId, int> hits;
    for (const auto& [a, b] : s.gt.pairs) {
      EXPECT_EQ(*node(s.graph_a, a).gt_instance, b);
      many_to_one += ++hits[b] == 2;
    }
  }
  EXPECT_GT(many_to_one, 0u);
}

TEST(S2S, IdenticalAndDisjointCrops) {
  const auto c = quiet(5);
  const auto scene = generate_scene(c);
  std::vector<int> all(scene.graph.size());
  std::iota(all.begin(), all.end(), 0);
  const auto same = make_s2s_pair_from_crops(scene, all, all, c, 1);
  EXPECT_EQ(same.gt.pairs.size(), all.size());
  EXPECT_EQ(same.overlap_ratio, 1.0);
  // Gravity aligned: heights survive the yaw-only transform.
  EXPECT_LT(std::abs(same.a_to_b->R(2, 2) - 1.0), 1e-12);

  const std::vector<int> left{0, 1, 2}, right{3, 4, 5};
  const auto apart = make_s2s_pair_from_crops(scene, left, right, c, 2);
  EXPECT_TRUE(apart.gt.pairs.empty());
  EXPECT_EQ(apart.overlap_ratio, 0.0);
}

TEST(S2S, OverlapWithinToleranceAndOneToOne) {
  SynthConfig c;
  c.s2s_crop_overlap = 0.5;
  c.n_objects_min = 15;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    c.seed = seed;
    const auto scene = generate_scene(c);
    const auto s = make_s2s_pair(scene, c, seed);
    EXPECT_NEAR(s.overlap_ratio, 0.5, 0.15) << "seed " << seed;
    std::set<NodeId> b_side;
    for (const auto& [a, b] : s.gt.pairs) EXPECT_TRUE(b_side.insert(b).second);
    EXPECT_EQ(s.task, Task::s2s);
  }
}

TEST(S2S, Deterministic) {
  SynthConfig c;
  c.seed = 8;
  const auto scene = generate_scene(c);
  const auto a = make_s2s_pair(scene, c, 3);
  const auto b = make_s2s_pair(scene, c, 3);
  expect_bit_identical(a.graph_a, b.graph_a);
  expect_bit_identical(a.graph_b, b.graph_b);
  EXPECT_EQ(a.gt.pairs, b.gt.pairs);
}

TEST(Synth, ZeroNoiseSelfAlignmentIsFixedPoint) {
  auto c = quiet(9);
  c.distinct_classes = true;
  c.n_objects_max = 14;
  const auto scene = generate_scene(c);
  std::vector<int> all(scene.graph.size());
  std::iota(all.begin(), all.end(), 0);
  const auto s = make_s2s_pair_from_crops(scene, all, all, c, 4);
  EncoderConfig ec;
  ec.feature_dims = c.feature_dims;
  const auto w = init_weights(ec, 0);
  const auto gt = gt_index_pairs(s.gt, s.graph_a, s.graph_b);
  for (auto kind : {AllocatorKind::mnn, AllocatorKind::mcf}) {
    AlignConfig ac;
    ac.allocator = kind;
    const auto r = align_graphs(s.graph_a, s.graph_b, w, ac);
    EXPECT_EQ(sample_metrics(r.matches, gt, static_cast<int>(s.graph_a.size())).f1, 1.0)
        << to_string(kind);
  }
}
