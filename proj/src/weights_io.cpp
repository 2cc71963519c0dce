#include "sga/weights_io.hpp"

#include "sga/errors.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

namespace sga {

Json encoder_config_to_json(const EncoderConfig& c) {
  return Json{{"pe_dim", c.pe_dim},
              {"heads", c.heads},
              {"layers", c.layers},
              {"d_model", c.d_model},
              {"gate_hidden", c.gate_hidden},
              {"geo_hidden", c.geo_hidden},
              {"dropout", c.dropout},
              {"feature_dims", Json::array({c.feature_dims.vl, c.feature_dims.t})}};
}

EncoderConfig encoder_config_from_json(const Json& j, EncoderConfig c) {
  if (!j.is_object()) throw LoadError("encoder config must be a JSON object");
  try {
    c.pe_dim = j.value("pe_dim", c.pe_dim);
    c.heads = j.value("heads", c.heads);
    c.layers = j.value("layers", c.layers);
    c.d_model = j.value("d_model", c.d_model);
    c.gate_hidden = j.value("gate_hidden", c.gate_hidden);
    c.geo_hidden = j.value("geo_hidden", c.geo_hidden);
    c.dropout = j.value("dropout", c.dropout);
    if (j.contains("feature_dims")) {
      const auto& d = j["feature_dims"];
      if (!d.is_array() || d.size() != 2) throw LoadError("feature_dims must be [D_vl, D_t]");
      c.feature_dims = {d[0].get<int>(), d[1].get<int>()};
    }
  } catch (const Json::exception& e) {
    throw LoadError(std::string("encoder config: ") + e.what());
  }
  return c;
}

Json weights_to_json(const EncoderWeights& w) {
  Json tensors = Json::object();
  w.for_each_tensor([&](const std::string& name, TensorRole, const auto& t) {
    using T = std::decay_t<decltype(t)>;
    if constexpr (std::is_same_v<T, Eigen::VectorXd>) {
      tensors[name] = vector_to_json(t);
    } else {
      Json rows = Json::array();
      for (Eigen::Index r = 0; r < t.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < t.cols(); ++c) row.push_back(t(r, c));
        rows.push_back(std::move(row));
      }
      tensors[name] = std::move(rows);
    }
  });
  Json j;
  j["format_version"] = kWeightsFormatVersion;
  j["config"] = encoder_config_to_json(w.config);
  j["seed"] = w.seed ? Json(*w.seed) : Json(nullptr);
  j["tensors"] = std::move(tensors);
  return j;
}

EncoderWeights weights_from_json(const Json& j) {
  if (!j.is_object()) throw LoadError("weights file must be a JSON object");
  const int version = j.value("format_version", 0);
  if (version != kWeightsFormatVersion) {
    throw LoadError("unsupported weights format_version " + std::to_string(version));
  }
  const EncoderConfig config = encoder_config_from_json(j.at("config"));
  config.validate();
  EncoderWeights w = EncoderWeights::zeros(config);
  if (j.contains("seed") && !j["seed"].is_null()) w.seed = j["seed"].get<std::uint64_t>();

  const Json& tensors = j.at("tensors");
  if (!tensors.is_object()) throw LoadError("\"tensors\" must be an object");

  std::set<std::string> known;
  std::vector<std::string> missing;
  w.for_each_tensor([&](const std::string& name, TensorRole, auto& t) {
    known.insert(name);
    auto it = tensors.find(name);
    if (it == tensors.end()) {
      missing.push_back(name);
      return;
    }
    using T = std::decay_t<decltype(t)>;
    if constexpr (std::is_same_v<T, Eigen::VectorXd>) {
      Eigen::VectorXd v = vector_from_json(*it, name.c_str());
      if (v.size() != t.size()) {
        throw LoadError(name + ": expected length " + std::to_string(t.size()) + ", got " +
                        std::to_string(v.size()));
      }
      t = std::move(v);
    } else {
      if (!it->is_array() || static_cast<Eigen::Index>(it->size()) != t.rows()) {
        throw LoadError(name + ": expected " + std::to_string(t.rows()) + " rows");
      }
      for (Eigen::Index r = 0; r < t.rows(); ++r) {
        const Json& row = (*it)[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != t.cols()) {
          throw LoadError(name + ": row " + std::to_string(r) + " must have " +
                          std::to_string(t.cols()) + " entries");
        }
        for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = row[static_cast<std::size_t>(c)].get<double>();
      }
    }
  });

  std::vector<std::string> unknown;
  for (const auto& [name, _] : tensors.items()) {
    if (!known.count(name)) unknown.push_back(name);
  }
  if (!unknown.empty()) {
    std::string msg = "unknown tensor names:";
    for (const auto& n : unknown) msg += " " + n;
    throw LoadError(msg);
  }
  if (!missing.empty()) {
    std::string msg = "missing tensors:";
    for (const auto& n : missing) msg += " " + n;
    throw LoadError(msg);
  }
  check_weights(w);
  return w;
}

void save_weights(const EncoderWeights& w, const std::filesystem::path& path) {
  write_json_file(weights_to_json(w), path);
}

EncoderWeights load_weights(const std::filesystem::path& path) {
  try {
    return weights_from_json(read_json_file(path));
  } catch (const Json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_content_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content_hash(bytes);
}

}  // namespace sga
