#pragma once

#include "sga/allocator.hpp"
#include "sga/encoder.hpp"
#include "sga/errors.hpp"
#include "sga/graph_io.hpp"
#include "sga/matcher.hpp"
#include "sga/pipeline.hpp"
#include "sga/registration.hpp"
#include "sga/retrieval.hpp"
#include "sga/scene_graph.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sga {

struct RetrievalConfig {
  int k = 5;
  RerankMode rerank = RerankMode::weighted;
  AllocatorKind allocator = AllocatorKind::mnn;
};

struct LossConfig {
  double infonce_temperature = 0.07;
  double triplet_margin = 0.5;
};

struct PathsConfig {
  std::optional<std::string> weights;
};

struct PipelineConfig {
  EncoderConfig encoder;
  McfParams mcf;
  MnnParams mnn;
  EdgeParams edges;
  MatcherParams matcher;
  AllocatorKind allocator = AllocatorKind::mcf;
  RetrievalConfig retrieval;
  RansacParams registration;
  LossConfig losses;
  PathsConfig paths;
  std::uint64_t seed = 0;

  AlignConfig align_config() const;
  AlignConfig align_config(AllocatorKind allocator) const;
};

// A constraint violation on a named config field, e.g. "mcf.max_iters".
class ConfigError : public InvalidParameter {
 public:
  ConfigError(std::string field, const std::string& constraint);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct LoadedConfig {
  PipelineConfig config;
  std::vector<std::string> warnings;  // unknown fields
};

Json config_to_json(const PipelineConfig& c);
// Missing fields keep defaults; unknown fields become warnings; bad values
// raise ConfigError; malformed types raise LoadError.
LoadedConfig config_from_json(const Json& j);

LoadedConfig load_config(const std::filesystem::path& path);
void save_config(const PipelineConfig& c, const std::filesystem::path& path);

void validate_config(const PipelineConfig& c);

}  // namespace sga
