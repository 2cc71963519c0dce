#include "sga/errors.hpp"
#include "sga/graph_io.hpp"
#include "sga/sample.hpp"
#include "sga/weights_io.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace sga;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sga_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void expect_same_graph(const SceneGraph& a, const SceneGraph& b) {
  EXPECT_EQ(a.graph_id, b.graph_id);
  EXPECT_EQ(a.frame_kind, b.frame_kind);
  EXPECT_EQ(a.feature_dims, b.feature_dims);
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (std::size_t k = 0; k < a.nodes.size(); ++k) {
    EXPECT_EQ(a.nodes[k].id, b.nodes[k].id);
    EXPECT_EQ(a.nodes[k].label, b.nodes[k].label);
    EXPECT_EQ(a.nodes[k].position, b.nodes[k].position);
    EXPECT_EQ(a.nodes[k].features.vl, b.nodes[k].features.vl);
    EXPECT_EQ(a.nodes[k].features.t, b.nodes[k].features.t);
    EXPECT_EQ(a.nodes[k].features.geo, b.nodes[k].features.geo);
    EXPECT_EQ(a.nodes[k].gt_instance, b.nodes[k].gt_instance);
  }
  EXPECT_EQ(a.edges, b.edges);
}

}  // namespace

TEST(GraphJson, RoundTripBitExact) {
  std::mt19937_64 rng(1);
  auto g = test::random_graph(rng, 12, {5, 4});
  g.frame_kind = FrameKind::camera;
  g.nodes[3].gt_instance = 42;
  g.nodes[4].label = "caf\xc3\xa9 chair";
  const auto dir = temp_dir("graph");
  save_graph(g, dir / "g.json");
  expect_same_graph(g, load_graph(dir / "g.json", {}));
}

TEST(GraphJson, NullEdgesAreBuilt) {
  std::mt19937_64 rng(2);
  const auto g = test::random_graph(rng, 20, {5, 4});
  Json j = graph_to_json(g);
  j["edges"] = nullptr;
  const auto h = graph_from_json(j, {});
  EXPECT_EQ(h.edges, g.edges);
  const auto k = graph_from_json(j, {1, 0.5});
  EXPECT_EQ(k.edges, build_edges(g.nodes, {1, 0.5}));
}

TEST(GraphJson, Malformed) {
  EXPECT_THROW(graph_from_json(Json::parse(R"({"nodes": 3})"), {}), LoadError);
  EXPECT_THROW(graph_from_json(Json::parse(R"({"graph_id": "x", "feature_dims": [1],
      "nodes": [], "edges": []})"),
                               {}),
               LoadError);
  const auto dir = temp_dir("malformed");
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW(load_graph(dir / "bad.json", {}), LoadError);
  EXPECT_THROW(load_graph(dir / "missing.json", {}), LoadError);
}

TEST(GroundTruthJson, RoundTrip) {
  GroundTruthFile f;
  f.gt.pairs = {{0, 5}, {1, 5}, {3, 2}};
  f.overlap = 0.75;
  f.task = Task::s2s;
  f.seed = 99;
  PairTransform t;
  std::mt19937_64 rng(3);
  t.R = test::random_rotation(rng);
  t.t = {1.5, -2.0, 0.25};
  f.a_to_b = t;
  const auto j = ground_truth_to_json(f);
  EXPECT_EQ(j["task"], "S2S");
  EXPECT_EQ(j["pairs"], Json::parse("[[0,5],[1,5],[3,2]]"));
  const auto g = ground_truth_from_json(j);
  EXPECT_EQ(g.gt.pairs, f.gt.pairs);
  EXPECT_EQ(g.overlap, 0.75);
  EXPECT_EQ(g.task, Task::s2s);
  EXPECT_EQ(g.seed, f.seed);
  ASSERT_TRUE(g.a_to_b.has_value());
  EXPECT_EQ(g.a_to_b->R, t.R);
  EXPECT_EQ(g.a_to_b->t, t.t);

  // The minimal documented form also loads.
  const auto m = ground_truth_from_json(Json::parse(R"({"pairs": [[1, 2]], "overlap": 0.5,
      "task": "F2S"})"));
  EXPECT_EQ(m.task, Task::f2s);
  EXPECT_FALSE(m.a_to_b.has_value());
}

TEST(Sample, SaveLoad) {
  std::mt19937_64 rng(4);
  AlignmentSample s;
  s.graph_a = test::random_graph(rng, 6, {5, 4});
  s.graph_b = test::random_graph(rng, 8, {5, 4});
  s.gt.pairs = {{0, 1}, {2, 3}};
  s.overlap_ratio = 2.0 / 6.0;
  s.task = Task::f2s;
  s.seed = 17;
  const auto dir = temp_dir("sample");
  save_sample(s, dir);
  EXPECT_TRUE(fs::exists(dir / "a.json"));
  EXPECT_TRUE(fs::exists(dir / "b.json"));
  EXPECT_TRUE(fs::exists(dir / "gt.json"));
  const auto t = load_sample(dir, {});
  expect_same_graph(s.graph_a, t.graph_a);
  expect_same_graph(s.graph_b, t.graph_b);
  EXPECT_EQ(t.gt.pairs, s.gt.pairs);
  EXPECT_EQ(t.overlap_ratio, s.overlap_ratio);
  EXPECT_EQ(t.seed, 17u);
}

TEST(WeightsJson, RoundTripBitExact) {
  const auto w = test::random_weights(test::small_config(), 5);
  const auto dir = temp_dir("weights");
  save_weights(w, dir / "w.json");
  const auto v = load_weights(dir / "w.json");
  EXPECT_EQ(v.config, w.config);
  EXPECT_EQ(v.seed, w.seed);
  std::vector<Eigen::MatrixXd> a, b;
  w.for_each_tensor([&](const std::string&, TensorRole, const auto& t) { a.emplace_back(t); });
  v.for_each_tensor([&](const std::string&, TensorRole, const auto& t) { b.emplace_back(t); });
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
  // Saving again gives identical bytes, so the content hash is stable.
  save_weights(v, dir / "w2.json");
  EXPECT_EQ(file_content_hash(dir / "w.json"), file_content_hash(dir / "w2.json"));
}

TEST(WeightsJson, UnknownAndMissingTensors) {
  const auto w = init_weights(test::small_config(), 0);
  Json j = weights_to_json(w);
  EXPECT_EQ(j["format_version"], 1);
  Json extra = j;
  extra["tensors"]["layer9.wq"] = Json::array();
  try {
    weights_from_json(extra);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("layer9.wq"), std::string::npos);
  }
  Json missing = j;
  missing["tensors"].erase("proj.w1");
  missing["tensors"].erase("cls.token");
  try {
    weights_from_json(missing);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("proj.w1"), std::string::npos);
    EXPECT_NE(msg.find("cls.token"), std::string::npos);
  }
  Json shape = j;
  shape["tensors"]["geo.b1"] = Json::array({1.0});
  EXPECT_THROW(weights_from_json(shape), Error);
}

TEST(ContentHash, Fnv1a) {
  // Reference values of 64-bit FNV-1a.
  EXPECT_EQ(content_hash(""), "cbf29ce484222325");
  EXPECT_EQ(content_hash("a"), "af63dc4c8601ec8c");
}
