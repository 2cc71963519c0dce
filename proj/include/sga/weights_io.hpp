#pragma once

#include "sga/encoder.hpp"
#include "sga/graph_io.hpp"

#include <filesystem>
#include <string>

namespace sga {

inline constexpr int kWeightsFormatVersion = 1;

Json encoder_config_to_json(const EncoderConfig& c);
// Fields absent from `j` keep the values already in `base`.
EncoderConfig encoder_config_from_json(const Json& j, EncoderConfig base = {});

// {"config": {...}, "tensors": {name: nested row-major arrays}, "seed": int|null,
//  "format_version": 1}. Vectors serialize as flat arrays.
Json weights_to_json(const EncoderWeights& w);
// Unknown tensor names and missing tensors are LoadErrors; shapes are checked.
EncoderWeights weights_from_json(const Json& j);

void save_weights(const EncoderWeights& w, const std::filesystem::path& path);
EncoderWeights load_weights(const std::filesystem::path& path);

// 64-bit FNV-1a over the raw file bytes, as 16 hex digits.
std::string file_content_hash(const std::filesystem::path& path);
std::string content_hash(std::string_view bytes);

}  // namespace sga
