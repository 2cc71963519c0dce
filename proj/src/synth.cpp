#include "sga/synth.hpp"

#include "sga/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sga {

namespace {

constexpr int kMaxPlacementAttempts = 100000;
constexpr int kMaxViewAttempts = 100;
constexpr int kMaxCropAttempts = 100;
constexpr double kMinExtent = 1e-3;

Eigen::VectorXd random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int k = 0; k < dim; ++k) v[k] = n(rng);
  return v.normalized();
}

// Additive isotropic Gaussian noise with expected norm ~sigma, then
// renormalization; sigma = 0 leaves v untouched.
Eigen::VectorXd noisy_unit(const Eigen::VectorXd& v, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0 || v.size() == 0) return v;
  std::normal_distribution<double> n(0.0, sigma / std::sqrt(static_cast<double>(v.size())));
  Eigen::VectorXd out = v;
  for (Eigen::Index k = 0; k < out.size(); ++k) out[k] += n(rng);
  const double norm = out.norm();
  return norm > 0.0 ? Eigen::VectorXd(out / norm) : v;
}

Eigen::Vector3d noisy_extents(const Eigen::Vector3d& g, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return g;
  std::normal_distribution<double> n(0.0, sigma);
  Eigen::Vector3d out;
  for (int k = 0; k < 3; ++k) out[k] = std::clamp(g[k] * (1.0 + n(rng)), kMinExtent, 1.0);
  return out;
}

Eigen::Vector3d noisy_position(const Eigen::Vector3d& x, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return x;
  std::normal_distribution<double> n(0.0, sigma);
  return x + Eigen::Vector3d(n(rng), n(rng), n(rng));
}

Eigen::Matrix3d yaw_rotation(double yaw) {
  return Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()).toRotationMatrix();
}

Node observe(const Node& object, const Eigen::Vector3d& world_pos, const Eigen::Matrix3d& R,
             const Eigen::Vector3d& t, const SynthConfig& config, std::mt19937_64& rng) {
  Node n;
  n.label = object.label;
  n.gt_instance = object.id;
  n.position = R * noisy_position(world_pos, config.position_noise_sigma, rng) + t;
  n.features.vl = noisy_unit(object.features.vl, config.feature_noise_sigma, rng);
  n.features.t = noisy_unit(object.features.t, config.feature_noise_sigma, rng);
  n.features.geo = noisy_extents(object.features.geo, config.feature_noise_sigma, rng);
  return n;
}

// Shuffles A nodes, assigns ids 0..n-1 and returns the permutation applied.
void shuffle_and_number(std::vector<Node>& nodes, std::mt19937_64& rng) {
  std::shuffle(nodes.begin(), nodes.end(), rng);
  for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k].id = static_cast<NodeId>(k);
}

GroundTruthMap gt_from_instances(const SceneGraph& a, const SceneGraph& b) {
  GroundTruthMap gt;
  for (const auto& na : a.nodes) {
    if (!na.gt_instance) continue;
    for (const auto& nb : b.nodes) {
      if (nb.gt_instance && *nb.gt_instance == *na.gt_instance) {
        gt.pairs.emplace_back(na.id, nb.id);
        break;
      }
    }
  }
  return gt;
}

double overlap_of(const GroundTruthMap& gt, std::size_t n_a) {
  return n_a == 0 ? 0.0 : static_cast<double>(gt.pairs.size()) / static_cast<double>(n_a);
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidParameter("synth config: " + msg); };
  if (n_objects_min < 1 || n_objects_max < n_objects_min) fail("need 1 <= n_objects_min <= n_objects_max");
  if (!(box_size > 0.0) || !(box_height > 0.0)) fail("box dimensions must be > 0");
  if (n_classes < 1) fail("n_classes must be >= 1");
  if (!(feature_noise_sigma >= 0.0) || !(position_noise_sigma >= 0.0)) fail("noise must be >= 0");
  if (!(undersegment_prob >= 0.0 && undersegment_prob <= 1.0)) fail("undersegment_prob must lie in [0, 1]");
  if (!(f2s_view_radius > 0.0)) fail("f2s_view_radius must be > 0");
  if (!(s2s_crop_overlap > 0.0 && s2s_crop_overlap <= 1.0)) fail("s2s_crop_overlap must lie in (0, 1]");
  if (!(s2s_overlap_tolerance >= 0.0)) fail("s2s_overlap_tolerance must be >= 0");
  if (!(min_separation >= 0.0)) fail("min_separation must be >= 0");
  if (feature_dims.vl < 1 || feature_dims.t < 1) fail("feature_dims must be positive");
}

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

SynthScene generate_scene(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const int n = std::uniform_int_distribution<int>(config.n_objects_min, config.n_objects_max)(rng);

  SynthScene scene;
  std::uniform_real_distribution<double> ext(0.2, 1.0);
  for (int c = 0; c < config.n_classes; ++c) {
    ClassPrototype p;
    p.label = "class_" + std::to_string(c);
    p.vl = random_unit(rng, config.feature_dims.vl);
    p.t = random_unit(rng, config.feature_dims.t);
    p.extents = Eigen::Vector3d(ext(rng), ext(rng), ext(rng));
    scene.classes.push_back(std::move(p));
  }

  if (config.distinct_classes) {
    if (n > config.n_classes) {
      throw GenerationError("distinct_classes needs n_classes >= object count (" +
                            std::to_string(n) + ")");
    }
    std::vector<int> perm(static_cast<std::size_t>(config.n_classes));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    scene.object_class.assign(perm.begin(), perm.begin() + n);
  } else {
    std::uniform_int_distribution<int> cls(0, config.n_classes - 1);
    for (int k = 0; k < n; ++k) scene.object_class.push_back(cls(rng));
  }

  std::uniform_real_distribution<double> ux(0.0, config.box_size);
  std::uniform_real_distribution<double> uz(0.0, config.box_height);
  std::vector<Eigen::Vector3d> placed;
  int attempts = 0;
  while (static_cast<int>(placed.size()) < n) {
    if (++attempts > kMaxPlacementAttempts) {
      throw GenerationError("could not place " + std::to_string(n) + " objects with separation " +
                            std::to_string(config.min_separation) + " m");
    }
    const Eigen::Vector3d x(ux(rng), ux(rng), uz(rng));
    const bool clear = std::all_of(placed.begin(), placed.end(), [&](const Eigen::Vector3d& y) {
      return (x - y).norm() >= config.min_separation;
    });
    if (clear) placed.push_back(x);
  }

  SceneGraph& g = scene.graph;
  g.graph_id = "scene_" + std::to_string(config.seed);
  g.frame_kind = FrameKind::world;
  g.feature_dims = config.feature_dims;
  for (int k = 0; k < n; ++k) {
    const ClassPrototype& p = scene.classes[static_cast<std::size_t>(scene.object_class[k])];
    Node node;
    node.id = k;
    node.label = p.label;
    node.position = placed[static_cast<std::size_t>(k)];
    node.features.vl = noisy_unit(p.vl, config.feature_noise_sigma, rng);
    node.features.t = noisy_unit(p.t, config.feature_noise_sigma, rng);
    node.features.geo = noisy_extents(p.extents, config.feature_noise_sigma, rng);
    node.gt_instance = k;
    g.nodes.push_back(std::move(node));
  }
  rebuild_edges(g, config.edges);
  return scene;
}

AlignmentSample make_f2s_pair(const SynthScene& scene, const SynthConfig& config,
                              std::uint64_t seed) {
  config.validate();
  const auto& objects = scene.graph.nodes;
  if (objects.size() < 3) throw InvalidInput("make_f2s_pair: scene needs at least 3 objects");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, config.box_size);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);

  std::vector<int> in_view;
  std::vector<char> split;
  bool found = false;
  for (int attempt = 0; attempt < kMaxViewAttempts && !found; ++attempt) {
    const Eigen::Vector3d view(ux(rng), ux(rng), 0.5 * config.box_height);
    in_view.clear();
    split.clear();
    for (std::size_t k = 0; k < objects.size(); ++k) {
      if ((objects[k].position - view).norm() <= config.f2s_view_radius) {
        in_view.push_back(static_cast<int>(k));
      }
    }
    std::size_t a_nodes = 0;
    for (std::size_t k = 0; k < in_view.size(); ++k) {
      split.push_back(unit(rng) < config.undersegment_prob ? 1 : 0);
      a_nodes += split.back() ? 2 : 1;
    }
    found = a_nodes >= 2;
  }
  if (!found) {
    throw GenerationError("make_f2s_pair: no viewpoint with at least 2 frame nodes after " +
                          std::to_string(kMaxViewAttempts) + " attempts");
  }

  // Camera pose: x_cam = R x_world + t.
  const Eigen::Matrix3d R = random_rotation(rng);
  std::uniform_real_distribution<double> ut(-5.0, 5.0);
  const Eigen::Vector3d t(ut(rng), ut(rng), ut(rng));

  std::vector<Node> a_nodes;
  for (std::size_t k = 0; k < in_view.size(); ++k) {
    const Node& obj = objects[static_cast<std::size_t>(in_view[k])];
    if (!split[k]) {
      a_nodes.push_back(observe(obj, obj.position, R, t, config, rng));
      continue;
    }
    // Two halves along a random horizontal axis, each offset by a quarter of
    // the object's extent along that axis.
    const double phi = angle(rng);
    const Eigen::Vector3d axis(std::cos(phi), std::sin(phi), 0.0);
    const double extent = std::abs(axis.x()) * obj.features.geo.x() + std::abs(axis.y()) * obj.features.geo.y();
    const Eigen::Vector3d offset = 0.25 * extent * axis;
    a_nodes.push_back(observe(obj, obj.position + offset, R, t, config, rng));
    a_nodes.push_back(observe(obj, obj.position - offset, R, t, config, rng));
  }
  shuffle_and_number(a_nodes, rng);

  AlignmentSample s;
  s.task = Task::f2s;
  s.seed = seed;
  s.graph_b = scene.graph;
  s.graph_a.graph_id = scene.graph.graph_id + "/frame_" + std::to_string(seed);
  s.graph_a.frame_kind = FrameKind::camera;
  s.graph_a.feature_dims = scene.graph.feature_dims;
  s.graph_a.nodes = std::move(a_nodes);
  rebuild_edges(s.graph_a, config.edges);
  rebuild_edges(s.graph_b, config.edges);
  s.gt = gt_from_instances(s.graph_a, s.graph_b);
  s.overlap_ratio = overlap_of(s.gt, s.graph_a.size());
  s.a_to_b = PairTransform{R.transpose(), -R.transpose() * t};
  return s;
}

AlignmentSample make_s2s_pair_from_crops(const SynthScene& scene, const std::vector<int>& crop_a,
                                         const std::vector<int>& crop_b, const SynthConfig& config,
                                         std::uint64_t seed) {
  config.validate();
  if (crop_a.empty() || crop_b.empty()) throw InvalidInput("make_s2s_pair: empty crop");
  const auto& objects = scene.graph.nodes;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> ut(-5.0, 5.0);

  auto subscan = [&](const std::vector<int>& crop, const std::string& tag, Eigen::Matrix3d& R,
                     Eigen::Vector3d& t) {
    R = yaw_rotation(angle(rng));
    t = Eigen::Vector3d(ut(rng), ut(rng), 0.0);
    SceneGraph g;
    g.graph_id = scene.graph.graph_id + "/" + tag + "_" + std::to_string(seed);
    g.frame_kind = FrameKind::world;
    g.feature_dims = scene.graph.feature_dims;
    for (int k : crop) {
      if (k < 0 || k >= static_cast<int>(objects.size())) throw InvalidInput("crop index out of range");
      const Node& obj = objects[static_cast<std::size_t>(k)];
      g.nodes.push_back(observe(obj, obj.position, R, t, config, rng));
    }
    shuffle_and_number(g.nodes, rng);
    rebuild_edges(g, config.edges);
    return g;
  };

  AlignmentSample s;
  s.task = Task::s2s;
  s.seed = seed;
  Eigen::Matrix3d Ra, Rb;
  Eigen::Vector3d ta, tb;
  s.graph_a = subscan(crop_a, "subscan_a", Ra, ta);
  s.graph_b = subscan(crop_b, "subscan_b", Rb, tb);
  s.gt = gt_from_instances(s.graph_a, s.graph_b);
  s.overlap_ratio = overlap_of(s.gt, s.graph_a.size());
  // x_a = Ra x + ta, x_b = Rb x + tb
  s.a_to_b = PairTransform{Rb * Ra.transpose(), tb - Rb * Ra.transpose() * ta};
  return s;
}

AlignmentSample make_s2s_pair(const SynthScene& scene, const SynthConfig& config,
                              std::uint64_t seed) {
  config.validate();
  const auto& objects = scene.graph.nodes;
  if (objects.size() < 6) throw InvalidInput("make_s2s_pair: scene needs at least 6 objects");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double target = config.s2s_crop_overlap;

  std::vector<int> best_a, best_b;
  double best_ratio = -1.0;
  for (int attempt = 0; attempt < kMaxCropAttempts; ++attempt) {
    const int axis = unit(rng) < 0.5 ? 0 : 1;
    const double width = (0.4 + 0.35 * unit(rng)) * config.box_size;
    const double a0 = unit(rng) * (config.box_size - width);
    const double shift = (1.0 - target) * width * (unit(rng) < 0.5 ? -1.0 : 1.0);
    double b0 = a0 + shift;
    if (b0 < 0.0 || b0 > config.box_size - width) b0 = a0 - shift;
    b0 = std::clamp(b0, 0.0, config.box_size - width);

    std::vector<int> ca, cb;
    for (std::size_t k = 0; k < objects.size(); ++k) {
      const double x = objects[k].position[axis];
      if (x >= a0 && x <= a0 + width) ca.push_back(static_cast<int>(k));
      if (x >= b0 && x <= b0 + width) cb.push_back(static_cast<int>(k));
    }
    if (ca.size() < 2 || cb.size() < 2) continue;
    std::size_t shared = 0;
    for (int k : ca) shared += std::count(cb.begin(), cb.end(), k);
    if (shared == 0) continue;
    const double ratio = static_cast<double>(shared) / static_cast<double>(ca.size());
    if (best_ratio < 0.0 || std::abs(ratio - target) < std::abs(best_ratio - target)) {
      best_ratio = ratio;
      best_a = std::move(ca);
      best_b = std::move(cb);
    }
    if (std::abs(best_ratio - target) <= config.s2s_overlap_tolerance) break;
  }
  if (best_ratio < 0.0 || std::abs(best_ratio - target) > config.s2s_overlap_tolerance) {
    std::ostringstream msg;
    msg << "make_s2s_pair: overlap " << target << " unattainable after " << kMaxCropAttempts
        << " crop attempts";
    if (best_ratio >= 0.0) msg << " (closest achieved " << best_ratio << ")";
    throw GenerationError(msg.str());
  }
  return make_s2s_pair_from_crops(scene, best_a, best_b, config, rng());
}

}  // namespace sga
