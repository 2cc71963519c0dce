#pragma once

#include "sga/graph_io.hpp"
#include "sga/scene_graph.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace sga {

// A pair of graphs with exact correspondences: the unit of evaluation.
struct AlignmentSample {
  SceneGraph graph_a;
  SceneGraph graph_b;
  GroundTruthMap gt;
  double overlap_ratio = 0.0;  // fraction of A nodes that have a gt partner
  Task task = Task::f2s;
  std::uint64_t seed = 0;
  std::optional<PairTransform> a_to_b;  // maps A-frame positions into the B frame
};

// Pair directory layout: a.json, b.json, gt.json.
void save_sample(const AlignmentSample& s, const std::filesystem::path& dir);
AlignmentSample load_sample(const std::filesystem::path& dir, const EdgeParams& edge_params);

}  // namespace sga
