#pragma once

#include "sga/scene_graph.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Geometry>

#include <filesystem>
#include <optional>
#include <string>

namespace sga {

using Json = nlohmann::json;

Json graph_to_json(const SceneGraph& g);
// `edge_params` builds edges when the document carries "edges": null.
SceneGraph graph_from_json(const Json& j, const EdgeParams& edge_params);

SceneGraph load_graph(const std::filesystem::path& path, const EdgeParams& edge_params);
void save_graph(const SceneGraph& g, const std::filesystem::path& path);

enum class Task { f2s, s2s };
std::string to_string(Task task);
Task task_from_string(const std::string& s);

// Rigid transform mapping A-frame positions into the B frame.
struct PairTransform {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
};

// Contents of gt.json in a pair directory.
struct GroundTruthFile {
  GroundTruthMap gt;
  double overlap = 0.0;
  Task task = Task::f2s;
  std::optional<std::uint64_t> seed;
  std::optional<PairTransform> a_to_b;
};

Json ground_truth_to_json(const GroundTruthFile& f);
GroundTruthFile ground_truth_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
// Writes `j` followed by a newline. indent < 0 writes compact JSON.
void write_json_file(const Json& j, const std::filesystem::path& path, int indent = -1);

Json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v);
Eigen::VectorXd vector_from_json(const Json& j, const char* what);

}  // namespace sga
