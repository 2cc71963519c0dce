#include "sga/config.hpp"

#include "sga/errors.hpp"
#include "sga/weights_io.hpp"

#include <cmath>
#include <set>

namespace sga {

ConfigError::ConfigError(std::string field, const std::string& constraint)
    : InvalidParameter("config field '" + field + "': " + constraint), field_(std::move(field)) {}

AlignConfig PipelineConfig::align_config() const { return align_config(allocator); }

AlignConfig PipelineConfig::align_config(AllocatorKind kind) const {
  AlignConfig a;
  a.matcher = matcher;
  a.allocator = kind;
  a.mnn = mnn;
  a.mcf = mcf;
  return a;
}

namespace {

void require(bool ok, const std::string& field, const std::string& constraint) {
  if (!ok) throw ConfigError(field, constraint);
}

void note_unknown(const Json& section, const std::string& prefix,
                  std::initializer_list<const char*> known, std::vector<std::string>& warnings) {
  if (!section.is_object()) return;
  std::set<std::string> names(known.begin(), known.end());
  for (const auto& [key, _] : section.items()) {
    if (!names.count(key)) warnings.push_back("unknown config field '" + prefix + key + "'");
  }
}

const Json& section(const Json& j, const char* name) {
  static const Json empty = Json::object();
  if (!j.contains(name)) return empty;
  const Json& s = j[name];
  if (!s.is_object()) throw LoadError(std::string("config section '") + name + "' must be an object");
  return s;
}

}  // namespace

void validate_config(const PipelineConfig& c) {
  const auto& e = c.encoder;
  require(e.pe_dim > 0 && e.pe_dim % 2 == 0, "encoder.pe_dim", "must be a positive even integer");
  require(e.heads >= 1, "encoder.heads", "must be >= 1");
  require(e.layers >= 1, "encoder.layers", "must be >= 1");
  require(e.d_model >= 1 && e.d_model % std::max(1, e.heads) == 0, "encoder.d_model",
          "must be a positive multiple of encoder.heads");
  require(e.gate_hidden >= 1, "encoder.gate_hidden", "must be >= 1");
  require(e.geo_hidden >= 1, "encoder.geo_hidden", "must be >= 1");
  require(e.dropout >= 0.0 && e.dropout < 1.0, "encoder.dropout", "must lie in [0, 1)");
  require(e.feature_dims.vl >= 1 && e.feature_dims.t >= 1, "encoder.feature_dims",
          "must be positive");

  require(c.mcf.tau >= 0.0 && c.mcf.tau <= 1.0, "mcf.tau", "must lie in [0, 1]");
  require(c.mcf.top_k >= 1, "mcf.top_k", "must be >= 1");
  require(std::isfinite(c.mcf.c_unmatched), "mcf.c_unmatched", "must be finite");
  require(c.mcf.lambda >= 0.0 && std::isfinite(c.mcf.lambda), "mcf.lambda", "must be >= 0");
  require(!c.mcf.cap_max || *c.mcf.cap_max >= 1, "mcf.cap_max", "must be >= 1 or \"unlimited\"");
  require(c.mcf.max_iters >= 1, "mcf.max_iters", "must be >= 1");
  require(c.mcf.cost_scale >= 1, "mcf.cost_scale", "must be >= 1");
  require(c.mcf.src_cap >= 1, "mcf.src_cap", "must be >= 1");

  require(c.mnn.min_score >= 0.0 && c.mnn.min_score <= 1.0, "mnn.min_score", "must lie in [0, 1]");
  require(c.edges.n_max >= 1, "edges.n_max", "must be >= 1");
  require(c.edges.d_th > 0.0, "edges.d_th", "must be > 0");
  require(c.matcher.temperature > 0.0 && std::isfinite(c.matcher.temperature),
          "matcher.temperature", "must be > 0");
  require(!std::isnan(c.matcher.dustbin_logit), "matcher.dustbin_logit", "must be a number");
  require(c.retrieval.k >= 1, "retrieval.k", "must be >= 1");
  require(c.registration.iters >= 1, "registration.iters", "must be >= 1");
  require(c.registration.inlier_eps > 0.0, "registration.inlier_eps", "must be > 0");
  require(c.losses.infonce_temperature > 0.0, "losses.infonce_temperature", "must be > 0");
  require(c.losses.triplet_margin > 0.0, "losses.triplet_margin", "must be > 0");
}

Json config_to_json(const PipelineConfig& c) {
  Json j;
  j["encoder"] = encoder_config_to_json(c.encoder);
  j["mcf"] = {{"tau", c.mcf.tau},
              {"top_k", c.mcf.top_k},
              {"c_unmatched", c.mcf.c_unmatched},
              {"lambda", c.mcf.lambda},
              {"cap_max", c.mcf.cap_max ? Json(*c.mcf.cap_max) : Json("unlimited")},
              {"max_iters", c.mcf.max_iters},
              {"cost_scale", c.mcf.cost_scale},
              {"src_cap", c.mcf.src_cap}};
  j["mnn"] = {{"min_score", c.mnn.min_score}};
  j["edges"] = {{"n_max", c.edges.n_max}, {"d_th", c.edges.d_th}};
  j["matcher"] = {{"mode", to_string(c.matcher.mode)},
                  {"temperature", c.matcher.temperature},
                  {"dustbin_logit", c.matcher.dustbin_logit}};
  j["allocator"] = to_string(c.allocator);
  j["retrieval"] = {{"k", c.retrieval.k},
                    {"rerank", to_string(c.retrieval.rerank)},
                    {"allocator", to_string(c.retrieval.allocator)}};
  j["registration"] = {{"iters", c.registration.iters},
                       {"inlier_eps", c.registration.inlier_eps},
                       {"seed", c.registration.seed}};
  j["losses"] = {{"infonce_temperature", c.losses.infonce_temperature},
                 {"triplet_margin", c.losses.triplet_margin}};
  j["paths"] = {{"weights", c.paths.weights ? Json(*c.paths.weights) : Json(nullptr)}};
  j["seed"] = c.seed;
  return j;
}

LoadedConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw LoadError("config must be a JSON object");
  LoadedConfig out;
  PipelineConfig& c = out.config;
  auto& warn = out.warnings;
  try {
    note_unknown(j, "",
                 {"encoder", "mcf", "mnn", "edges", "matcher", "allocator", "retrieval",
                  "registration", "losses", "paths", "seed"},
                 warn);

    const Json& enc = section(j, "encoder");
    note_unknown(enc, "encoder.",
                 {"pe_dim", "heads", "layers", "d_model", "gate_hidden", "geo_hidden", "dropout",
                  "feature_dims"},
                 warn);
    c.encoder = encoder_config_from_json(enc, c.encoder);

    const Json& mcf = section(j, "mcf");
    note_unknown(mcf, "mcf.",
                 {"tau", "top_k", "c_unmatched", "lambda", "cap_max", "max_iters", "cost_scale",
                  "src_cap"},
                 warn);
    c.mcf.tau = mcf.value("tau", c.mcf.tau);
    c.mcf.top_k = mcf.value("top_k", c.mcf.top_k);
    c.mcf.c_unmatched = mcf.value("c_unmatched", c.mcf.c_unmatched);
    c.mcf.lambda = mcf.value("lambda", c.mcf.lambda);
    if (mcf.contains("cap_max")) {
      const Json& cap = mcf["cap_max"];
      if (cap.is_null() || (cap.is_string() && cap.get<std::string>() == "unlimited")) {
        c.mcf.cap_max.reset();
      } else if (cap.is_number_integer()) {
        c.mcf.cap_max = cap.get<int>();
      } else {
        throw ConfigError("mcf.cap_max", "must be a positive integer or \"unlimited\"");
      }
    }
    c.mcf.max_iters = mcf.value("max_iters", c.mcf.max_iters);
    c.mcf.cost_scale = mcf.value("cost_scale", c.mcf.cost_scale);
    c.mcf.src_cap = mcf.value("src_cap", c.mcf.src_cap);

    const Json& mnn = section(j, "mnn");
    note_unknown(mnn, "mnn.", {"min_score"}, warn);
    c.mnn.min_score = mnn.value("min_score", c.mnn.min_score);

    const Json& edges = section(j, "edges");
    note_unknown(edges, "edges.", {"n_max", "d_th"}, warn);
    c.edges.n_max = edges.value("n_max", c.edges.n_max);
    c.edges.d_th = edges.value("d_th", c.edges.d_th);

    const Json& matcher = section(j, "matcher");
    note_unknown(matcher, "matcher.", {"mode", "temperature", "dustbin_logit"}, warn);
    if (matcher.contains("mode")) {
      try {
        c.matcher.mode = score_mode_from_string(matcher["mode"].get<std::string>());
      } catch (const InvalidParameter&) {
        throw ConfigError("matcher.mode", "must be \"raw\" or \"dual_softmax\"");
      }
    }
    c.matcher.temperature = matcher.value("temperature", c.matcher.temperature);
    c.matcher.dustbin_logit = matcher.value("dustbin_logit", c.matcher.dustbin_logit);

    if (j.contains("allocator")) {
      try {
        c.allocator = allocator_from_string(j["allocator"].get<std::string>());
      } catch (const InvalidParameter&) {
        throw ConfigError("allocator", "must be \"mnn\" or \"mcf\"");
      }
    }

    const Json& ret = section(j, "retrieval");
    note_unknown(ret, "retrieval.", {"k", "rerank", "allocator"}, warn);
    c.retrieval.k = ret.value("k", c.retrieval.k);
    if (ret.contains("rerank")) {
      try {
        c.retrieval.rerank = rerank_mode_from_string(ret["rerank"].get<std::string>());
      } catch (const InvalidParameter&) {
        throw ConfigError("retrieval.rerank", "must be \"direct\" or \"weighted\"");
      }
    }
    if (ret.contains("allocator")) {
      try {
        c.retrieval.allocator = allocator_from_string(ret["allocator"].get<std::string>());
      } catch (const InvalidParameter&) {
        throw ConfigError("retrieval.allocator", "must be \"mnn\" or \"mcf\"");
      }
    }

    const Json& reg = section(j, "registration");
    note_unknown(reg, "registration.", {"iters", "inlier_eps", "seed"}, warn);
    c.registration.iters = reg.value("iters", c.registration.iters);
    c.registration.inlier_eps = reg.value("inlier_eps", c.registration.inlier_eps);
    c.registration.seed = reg.value("seed", c.registration.seed);

    const Json& losses = section(j, "losses");
    note_unknown(losses, "losses.", {"infonce_temperature", "triplet_margin"}, warn);
    c.losses.infonce_temperature = losses.value("infonce_temperature", c.losses.infonce_temperature);
    c.losses.triplet_margin = losses.value("triplet_margin", c.losses.triplet_margin);

    const Json& paths = section(j, "paths");
    note_unknown(paths, "paths.", {"weights"}, warn);
    if (paths.contains("weights") && !paths["weights"].is_null()) {
      c.paths.weights = paths["weights"].get<std::string>();
    }

    c.seed = j.value("seed", c.seed);
  } catch (const Json::exception& e) {
    throw LoadError(std::string("config: ") + e.what());
  }
  validate_config(c);
  return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path));
}

void save_config(const PipelineConfig& c, const std::filesystem::path& path) {
  write_json_file(config_to_json(c), path, 2);
}

}  // namespace sga
