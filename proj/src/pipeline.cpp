#include "sga/pipeline.hpp"

#include "sga/errors.hpp"

namespace sga {

std::string to_string(AllocatorKind kind) { return kind == AllocatorKind::mnn ? "mnn" : "mcf"; }

AllocatorKind allocator_from_string(const std::string& s) {
  if (s == "mnn") return AllocatorKind::mnn;
  if (s == "mcf") return AllocatorKind::mcf;
  throw InvalidParameter("unknown allocator '" + s + "' (expected mnn or mcf)");
}

AlignResult align_encoded(const GraphEncoding& enc_a, const SceneGraph& a,
                          const GraphEncoding& enc_b, const SceneGraph& b,
                          const AlignConfig& config) {
  AlignResult out;
  const Eigen::Index I = enc_a.nodes.cols();
  const Eigen::Index J = enc_b.nodes.cols();
  if (I == 0 || J == 0) {
    out.scores.P = Eigen::MatrixXd::Zero(I, J);
    out.scores.dustbin_col = Eigen::VectorXd::Ones(I);
    out.scores.dustbin_row = Eigen::VectorXd::Ones(J);
    out.scores.mode = config.matcher.mode;
  } else {
    out.scores = score_matrix(cosine_scores(enc_a.nodes, enc_b.nodes), config.matcher);
  }
  if (config.allocator == AllocatorKind::mnn) {
    out.matches = mnn_allocate(out.scores, config.mnn);
  } else {
    const auto pa = a.positions();
    const auto pb = b.positions();
    out.matches = mcf_allocate(out.scores, pa, pb, config.mcf);
  }
  return out;
}

AlignResult align_graphs(const SceneGraph& a, const SceneGraph& b, const EncoderWeights& weights,
                         const AlignConfig& config) {
  return align_encoded(encode_graph(a, weights), a, encode_graph(b, weights), b, config);
}

}  // namespace sga
