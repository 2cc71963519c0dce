#pragma once

#include "sga/encoder.hpp"
#include "sga/pipeline.hpp"
#include "sga/scene_graph.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sga {

struct SceneEntry {
  std::string scene_id;
  SceneGraph graph;
  GraphEncoding encoding;  // global is unit norm
};

class SceneDatabase {
 public:
  // Throws InvalidInput on a duplicate scene_id or a non-unit global embedding.
  void add(std::string scene_id, SceneGraph graph, GraphEncoding encoding);
  void add(std::string scene_id, SceneGraph graph, const EncoderWeights& weights);

  const std::vector<SceneEntry>& entries() const { return entries_; }
  const SceneEntry* find(const std::string& scene_id) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Writes index.json plus one graph and one embedding file per scene.
  void save(const std::filesystem::path& dir, const std::string& weights_hash) const;

  // Reads a directory written by save(). Cached embeddings whose weights hash
  // differs from `weights_hash` are recomputed (and rewritten when
  // `write_cache`). A directory without index.json is treated as a flat set
  // of scene-graph files, one scene per *.json, scene_id = file stem.
  static SceneDatabase open(const std::filesystem::path& dir, const EncoderWeights& weights,
                            const std::string& weights_hash, const EdgeParams& edge_params,
                            bool write_cache = true);

 private:
  std::vector<SceneEntry> entries_;
};

double global_similarity(const Eigen::VectorXd& q, const Eigen::VectorXd& t);

// The k most similar scene ids, ties by scene_id; all scenes when k > |db|.
std::vector<std::string> topk_filter(const Eigen::VectorXd& query, const SceneDatabase& db, int k);

enum class RerankMode { direct, weighted };

std::string to_string(RerankMode mode);
RerankMode rerank_mode_from_string(const std::string& s);

struct RankedScene {
  std::string scene_id;
  double score = 0.0;
  double global_similarity = 0.0;
  std::optional<MatchSet> matches;
  bool failed = false;
  std::string error;
  double seconds = 0.0;
};

struct RetrievalResult {
  std::vector<RankedScene> ranked;  // scores non-increasing

  // 1-based rank of the scene, or nullopt when absent.
  std::optional<std::size_t> rank_of(const std::string& scene_id) const;
};

// Sum of P over matched pairs, times the global dot product in weighted mode.
double rerank_score(const ScoreMatrix& scores, const MatchSet& matches, double global_dot,
                    RerankMode mode);

RetrievalResult rerank(const SceneGraph& query_graph, const GraphEncoding& query_encoding,
                       const SceneDatabase& db, std::span<const std::string> candidates,
                       RerankMode mode, const AlignConfig& config);

// topk_filter followed by rerank.
RetrievalResult retrieve(const SceneGraph& query_graph, const GraphEncoding& query_encoding,
                         const SceneDatabase& db, int k, RerankMode mode,
                         const AlignConfig& config);

}  // namespace sga
