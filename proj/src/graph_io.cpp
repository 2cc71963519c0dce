#include "sga/graph_io.hpp"

#include "sga/errors.hpp"

#include <fstream>
#include <sstream>

namespace sga {

Json vector_to_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

Eigen::VectorXd vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw LoadError(std::string(what) + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw LoadError(std::string(what) + ": non-numeric entry");
    v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  }
  return v;
}

namespace {

Eigen::Vector3d vec3_from_json(const Json& j, const char* what) {
  Eigen::VectorXd v = vector_from_json(j, what);
  if (v.size() != 3) throw LoadError(std::string(what) + ": expected 3 components");
  return v;
}

}  // namespace

Json graph_to_json(const SceneGraph& g) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes) {
    Json jn;
    jn["id"] = n.id;
    jn["label"] = n.label;
    jn["position"] = vector_to_json(n.position);
    jn["f_vl"] = vector_to_json(n.features.vl);
    jn["f_t"] = vector_to_json(n.features.t);
    jn["f_g"] = vector_to_json(n.features.geo);
    jn["gt_instance"] = n.gt_instance ? Json(*n.gt_instance) : Json(nullptr);
    nodes.push_back(std::move(jn));
  }
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back(Json::array({e.i, e.j, e.d}));

  Json j;
  j["graph_id"] = g.graph_id;
  j["frame_kind"] = to_string(g.frame_kind);
  j["feature_dims"] = Json::array({g.feature_dims.vl, g.feature_dims.t});
  j["nodes"] = std::move(nodes);
  j["edges"] = std::move(edges);
  return j;
}

SceneGraph graph_from_json(const Json& j, const EdgeParams& edge_params) {
  try {
    SceneGraph g;
    g.graph_id = j.at("graph_id").get<std::string>();
    g.frame_kind = frame_kind_from_string(j.at("frame_kind").get<std::string>());
    const auto& dims = j.at("feature_dims");
    if (!dims.is_array() || dims.size() != 2) throw LoadError("feature_dims must be [D_vl, D_t]");
    g.feature_dims = {dims[0].get<int>(), dims[1].get<int>()};

    for (const auto& jn : j.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<NodeId>();
      n.label = jn.value("label", std::string());
      n.position = vec3_from_json(jn.at("position"), "position");
      n.features.vl = vector_from_json(jn.at("f_vl"), "f_vl");
      n.features.t = vector_from_json(jn.at("f_t"), "f_t");
      n.features.geo = vec3_from_json(jn.at("f_g"), "f_g");
      if (jn.contains("gt_instance") && !jn["gt_instance"].is_null()) {
        n.gt_instance = jn["gt_instance"].get<NodeId>();
      }
      g.nodes.push_back(std::move(n));
    }

    const Json* edges = j.contains("edges") ? &j["edges"] : nullptr;
    if (edges == nullptr || edges->is_null()) {
      g.edges = build_edges(g.nodes, edge_params);
    } else {
      for (const auto& je : *edges) {
        if (!je.is_array() || je.size() != 3) throw LoadError("edges entries must be [i, j, d]");
        Edge e{je[0].get<NodeId>(), je[1].get<NodeId>(), je[2].get<double>()};
        g.edges.push_back(e);
      }
    }
    return g;
  } catch (const Json::exception& e) {
    throw LoadError(std::string("scene graph JSON: ") + e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void write_json_file(const Json& j, const std::filesystem::path& path, int indent) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write " + path.string());
  out << j.dump(indent) << '\n';
}

SceneGraph load_graph(const std::filesystem::path& path, const EdgeParams& edge_params) {
  return graph_from_json(read_json_file(path), edge_params);
}

void save_graph(const SceneGraph& g, const std::filesystem::path& path) {
  write_json_file(graph_to_json(g), path);
}

std::string to_string(Task task) { return task == Task::f2s ? "F2S" : "S2S"; }

Task task_from_string(const std::string& s) {
  if (s == "F2S" || s == "f2s") return Task::f2s;
  if (s == "S2S" || s == "s2s") return Task::s2s;
  throw InvalidInput("unknown task '" + s + "'");
}

Json ground_truth_to_json(const GroundTruthFile& f) {
  Json pairs = Json::array();
  for (const auto& [a, b] : f.gt.pairs) pairs.push_back(Json::array({a, b}));
  Json j;
  j["pairs"] = std::move(pairs);
  j["overlap"] = f.overlap;
  j["task"] = to_string(f.task);
  if (f.seed) j["seed"] = *f.seed;
  if (f.a_to_b) {
    Json rows = Json::array();
    for (int r = 0; r < 3; ++r) {
      rows.push_back(Json::array({f.a_to_b->R(r, 0), f.a_to_b->R(r, 1), f.a_to_b->R(r, 2)}));
    }
    j["transform"] = {{"R", rows}, {"t", vector_to_json(f.a_to_b->t)}};
  }
  return j;
}

GroundTruthFile ground_truth_from_json(const Json& j) {
  try {
    GroundTruthFile f;
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 2) throw LoadError("gt pairs must be [id_a, id_b]");
      f.gt.pairs.emplace_back(p[0].get<NodeId>(), p[1].get<NodeId>());
    }
    f.overlap = j.value("overlap", 0.0);
    f.task = task_from_string(j.value("task", std::string("F2S")));
    if (j.contains("seed") && !j["seed"].is_null()) f.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("transform")) {
      PairTransform tf;
      const auto& rows = j["transform"].at("R");
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) tf.R(r, c) = rows.at(r).at(c).get<double>();
      }
      tf.t = vec3_from_json(j["transform"].at("t"), "transform.t");
      f.a_to_b = tf;
    }
    return f;
  } catch (const Json::exception& e) {
    throw LoadError(std::string("gt JSON: ") + e.what());
  }
}

}  // namespace sga
