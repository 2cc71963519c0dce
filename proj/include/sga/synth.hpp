#pragma once

#include "sga/sample.hpp"
#include "sga/scene_graph.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sga {

struct SynthConfig {
  std::uint64_t seed = 0;
  int n_objects_min = 8;
  int n_objects_max = 30;
  double box_size = 8.0;    // horizontal extent of the scene, meters
  double box_height = 2.5;  // vertical extent, meters
  int n_classes = 40;
  bool distinct_classes = false;  // every object gets its own class
  double feature_noise_sigma = 0.05;
  double position_noise_sigma = 0.02;
  double undersegment_prob = 0.05;  // F2S only
  double f2s_view_radius = 3.0;
  double s2s_crop_overlap = 0.5;
  double s2s_overlap_tolerance = 0.1;
  double min_separation = 0.3;
  FeatureDims feature_dims;
  EdgeParams edges;

  void validate() const;
};

struct ClassPrototype {
  std::string label;
  Eigen::VectorXd vl;  // unit
  Eigen::VectorXd t;   // unit
  Eigen::Vector3d extents;
};

struct SynthScene {
  SceneGraph graph;  // world frame, node id = object index
  std::vector<ClassPrototype> classes;
  std::vector<int> object_class;
};

SynthScene generate_scene(const SynthConfig& config);

// Frame-to-scan pair: a radius-limited view of the scene in a random SO(3)
// camera frame (graph A) against the full scene (graph B).
AlignmentSample make_f2s_pair(const SynthScene& scene, const SynthConfig& config,
                              std::uint64_t seed);

// Subscan-to-subscan pair: two axis-aligned crops whose overlap is steered
// toward config.s2s_crop_overlap, each in its own yaw-rotated world frame.
AlignmentSample make_s2s_pair(const SynthScene& scene, const SynthConfig& config,
                              std::uint64_t seed);

// S2S pair from explicit object index sets (each crop needs >= 1 object).
AlignmentSample make_s2s_pair_from_crops(const SynthScene& scene, const std::vector<int>& crop_a,
                                         const std::vector<int>& crop_b, const SynthConfig& config,
                                         std::uint64_t seed);

// Uniformly distributed rotation.
Eigen::Matrix3d random_rotation(std::mt19937_64& rng);

}  // namespace sga
