#pragma once

#include "sga/allocator.hpp"
#include "sga/encoder.hpp"
#include "sga/matcher.hpp"
#include "sga/scene_graph.hpp"

#include <string>

namespace sga {

enum class AllocatorKind { mnn, mcf };

std::string to_string(AllocatorKind kind);
AllocatorKind allocator_from_string(const std::string& s);

struct AlignConfig {
  MatcherParams matcher;
  AllocatorKind allocator = AllocatorKind::mcf;
  MnnParams mnn;
  McfParams mcf;
};

struct AlignResult {
  ScoreMatrix scores;
  MatchSet matches;
};

// Score and allocate two already-encoded graphs.
AlignResult align_encoded(const GraphEncoding& enc_a, const SceneGraph& a,
                          const GraphEncoding& enc_b, const SceneGraph& b,
                          const AlignConfig& config);

AlignResult align_graphs(const SceneGraph& a, const SceneGraph& b, const EncoderWeights& weights,
                         const AlignConfig& config);

}  // namespace sga
