#include "sga/retrieval.hpp"

#include "sga/errors.hpp"
#include "sga/graph_io.hpp"
#include "sga/log.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace sga {

namespace fs = std::filesystem;

namespace {

constexpr int kDatabaseFormatVersion = 1;

Json encoding_to_json(const GraphEncoding& enc, const std::string& weights_hash) {
  Json nodes = Json::array();
  for (Eigen::Index k = 0; k < enc.nodes.cols(); ++k) nodes.push_back(vector_to_json(enc.nodes.col(k)));
  return Json{{"weights_hash", weights_hash}, {"global", vector_to_json(enc.global)}, {"nodes", nodes}};
}

std::optional<GraphEncoding> encoding_from_json(const Json& j, const std::string& weights_hash,
                                                Eigen::Index n, Eigen::Index d_model) {
  if (j.value("weights_hash", std::string()) != weights_hash) return std::nullopt;
  GraphEncoding enc;
  enc.global = vector_from_json(j.at("global"), "global");
  const auto& nodes = j.at("nodes");
  if (enc.global.size() != d_model || static_cast<Eigen::Index>(nodes.size()) != n) return std::nullopt;
  enc.nodes.resize(d_model, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd v = vector_from_json(nodes[static_cast<std::size_t>(k)], "nodes");
    if (v.size() != d_model) return std::nullopt;
    enc.nodes.col(k) = v;
  }
  return enc;
}

std::string safe_file_stem(const std::string& scene_id) {
  std::string out;
  for (char c : scene_id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

}  // namespace

void SceneDatabase::add(std::string scene_id, SceneGraph graph, GraphEncoding encoding) {
  if (find(scene_id) != nullptr) throw InvalidInput("duplicate scene_id '" + scene_id + "'");
  if (std::abs(encoding.global.norm() - 1.0) > 1e-6) {
    throw InvalidInput("scene '" + scene_id + "': global embedding is not unit norm");
  }
  entries_.push_back({std::move(scene_id), std::move(graph), std::move(encoding)});
}

void SceneDatabase::add(std::string scene_id, SceneGraph graph, const EncoderWeights& weights) {
  GraphEncoding enc = encode_graph(graph, weights);
  add(std::move(scene_id), std::move(graph), std::move(enc));
}

const SceneEntry* SceneDatabase::find(const std::string& scene_id) const {
  for (const auto& e : entries_) {
    if (e.scene_id == scene_id) return &e;
  }
  return nullptr;
}

void SceneDatabase::save(const fs::path& dir, const std::string& weights_hash) const {
  fs::create_directories(dir);
  Json scenes = Json::array();
  for (const auto& e : entries_) {
    const std::string stem = safe_file_stem(e.scene_id);
    const std::string graph_file = stem + ".graph.json";
    const std::string emb_file = stem + ".emb.json";
    save_graph(e.graph, dir / graph_file);
    write_json_file(encoding_to_json(e.encoding, weights_hash), dir / emb_file);
    scenes.push_back({{"scene_id", e.scene_id}, {"graph", graph_file}, {"embedding", emb_file}});
  }
  write_json_file(Json{{"format_version", kDatabaseFormatVersion},
                       {"weights_hash", weights_hash},
                       {"scenes", scenes}},
                  dir / "index.json", 2);
}

SceneDatabase SceneDatabase::open(const fs::path& dir, const EncoderWeights& weights,
                                  const std::string& weights_hash, const EdgeParams& edge_params,
                                  bool write_cache) {
  if (!fs::is_directory(dir)) throw LoadError("database directory not found: " + dir.string());
  SceneDatabase db;
  const fs::path index_path = dir / "index.json";

  if (!fs::exists(index_path)) {
    std::vector<fs::path> files;
    for (const auto& item : fs::directory_iterator(dir)) {
      if (item.is_regular_file() && item.path().extension() == ".json") files.push_back(item.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      db.add(f.stem().string(), load_graph(f, edge_params), weights);
    }
    return db;
  }

  const Json index = read_json_file(index_path);
  if (index.value("format_version", 0) != kDatabaseFormatVersion) {
    throw LoadError("unsupported database format_version in " + index_path.string());
  }
  for (const auto& s : index.at("scenes")) {
    const std::string id = s.at("scene_id").get<std::string>();
    SceneGraph g = load_graph(dir / s.at("graph").get<std::string>(), edge_params);
    std::optional<GraphEncoding> enc;
    const fs::path emb_path = dir / s.value("embedding", std::string());
    if (s.contains("embedding") && fs::exists(emb_path)) {
      enc = encoding_from_json(read_json_file(emb_path), weights_hash,
                               static_cast<Eigen::Index>(g.size()), weights.config.d_model);
    }
    if (!enc) {
      log::debug("re-encoding scene '" + id + "' (missing or stale embedding cache)");
      enc = encode_graph(g, weights);
      if (write_cache && s.contains("embedding")) {
        write_json_file(encoding_to_json(*enc, weights_hash), emb_path);
      }
    }
    db.add(id, std::move(g), std::move(*enc));
  }
  if (write_cache && index.value("weights_hash", std::string()) != weights_hash) {
    Json updated = index;
    updated["weights_hash"] = weights_hash;
    write_json_file(updated, index_path, 2);
  }
  return db;
}

double global_similarity(const Eigen::VectorXd& q, const Eigen::VectorXd& t) {
  if (q.size() != t.size()) throw ShapeError("global_similarity: dimension mismatch");
  return q.dot(t);
}

std::vector<std::string> topk_filter(const Eigen::VectorXd& query, const SceneDatabase& db, int k) {
  if (k < 1) throw InvalidParameter("topk_filter: k must be >= 1");
  std::vector<std::pair<double, const std::string*>> scored;
  scored.reserve(db.size());
  for (const auto& e : db.entries()) {
    scored.emplace_back(global_similarity(query, e.encoding.global), &e.scene_id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return *x.second < *y.second;
  });
  const std::size_t keep = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(k));
  std::vector<std::string> out;
  out.reserve(keep);
  for (std::size_t r = 0; r < keep; ++r) out.push_back(*scored[r].second);
  return out;
}

std::string to_string(RerankMode mode) { return mode == RerankMode::direct ? "direct" : "weighted"; }

RerankMode rerank_mode_from_string(const std::string& s) {
  if (s == "direct") return RerankMode::direct;
  if (s == "weighted") return RerankMode::weighted;
  throw InvalidParameter("unknown rerank mode '" + s + "' (expected direct or weighted)");
}

std::optional<std::size_t> RetrievalResult::rank_of(const std::string& scene_id) const {
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (ranked[r].scene_id == scene_id) return r + 1;
  }
  return std::nullopt;
}

double rerank_score(const ScoreMatrix& scores, const MatchSet& matches, double global_dot,
                    RerankMode mode) {
  double sum = 0.0;
  for (const auto& m : matches.pairs) sum += scores.P(m.i, m.j);
  return mode == RerankMode::weighted ? global_dot * sum : sum;
}

RetrievalResult rerank(const SceneGraph& query_graph, const GraphEncoding& query_encoding,
                       const SceneDatabase& db, std::span<const std::string> candidates,
                       RerankMode mode, const AlignConfig& config) {
  if (candidates.empty()) throw InvalidInput("rerank: no candidates");
  RetrievalResult result;
  for (const auto& id : candidates) {
    RankedScene r;
    r.scene_id = id;
    const auto start = std::chrono::steady_clock::now();
    try {
      const SceneEntry* e = db.find(id);
      if (e == nullptr) throw InvalidInput("unknown scene '" + id + "'");
      r.global_similarity = global_similarity(query_encoding.global, e->encoding.global);
      AlignResult aligned = align_encoded(query_encoding, query_graph, e->encoding, e->graph, config);
      r.score = rerank_score(aligned.scores, aligned.matches, r.global_similarity, mode);
      r.matches = std::move(aligned.matches);
    } catch (const Error& err) {
      r.failed = true;
      r.error = err.what();
      r.score = -std::numeric_limits<double>::infinity();
      r.matches.reset();
      log::warn("rerank: candidate '" + id + "' failed: " + err.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.ranked.push_back(std::move(r));
  }
  std::sort(result.ranked.begin(), result.ranked.end(), [](const RankedScene& x, const RankedScene& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.scene_id < y.scene_id;
  });
  return result;
}

RetrievalResult retrieve(const SceneGraph& query_graph, const GraphEncoding& query_encoding,
                         const SceneDatabase& db, int k, RerankMode mode,
                         const AlignConfig& config) {
  if (db.empty()) return {};
  const auto ids = topk_filter(query_encoding.global, db, k);
  return rerank(query_graph, query_encoding, db, ids, mode, config);
}

}  // namespace sga
