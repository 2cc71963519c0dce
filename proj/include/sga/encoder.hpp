#pragma once

#include "sga/scene_graph.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sga {

struct EncoderConfig {
  int pe_dim = 64;
  int heads = 8;
  int layers = 4;
  int d_model = 512;
  int gate_hidden = 16;
  int geo_hidden = 32;
  double dropout = 0.1;  // kept for fidelity; inference never samples it
  FeatureDims feature_dims;

  // Width of the per-node embedding that the attention blocks operate on:
  // [f_vl | f_t | geometry FFN output].
  int d_init() const { return feature_dims.vl + feature_dims.t + geo_hidden; }
  int d_head() const { return d_model / heads; }
  // Throws InvalidParameter naming the first broken constraint.
  void validate() const;

  bool operator==(const EncoderConfig&) const = default;
};

// 1 -> gate_hidden (ReLU) -> 1 -> sigmoid.
struct GateWeights {
  Eigen::MatrixXd w1;  // gate_hidden x 1
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // 1 x gate_hidden
  Eigen::VectorXd b2;  // size 1
};

// One distance-gated attention block. Key/value/neighbor-query projections
// act on h_ij = [PE(d_ij) | c_j]; their first pe_dim columns multiply the
// distance encoding.
struct DgsaLayerWeights {
  Eigen::MatrixXd wq;     // d_model x d_init
  Eigen::MatrixXd wk;     // d_model x (pe_dim + d_init)
  Eigen::MatrixXd wv;     // d_model x (pe_dim + d_init)
  Eigen::MatrixXd wq_nn;  // d_model x (pe_dim + d_init)
  Eigen::MatrixXd wk_nn;  // d_model x (pe_dim + d_init)
  Eigen::MatrixXd wv_nn;  // d_model x (pe_dim + d_init)
  Eigen::MatrixXd wo;     // d_init x d_model, no bias
  Eigen::VectorXd ln_gamma;
  Eigen::VectorXd ln_beta;
  GateWeights gate;
};

// Post-norm multi-head self-attention block of the class-token module.
struct ClassAttentionLayer {
  Eigen::MatrixXd wq, wk, wv, wo;  // d_model x d_model
  Eigen::VectorXd bo;
  Eigen::VectorXd ln_gamma;
  Eigen::VectorXd ln_beta;
};

enum class TensorRole { weight, bias, norm_scale, norm_shift, token };

struct EncoderWeights {
  EncoderConfig config;
  std::optional<std::uint64_t> seed;

  // geometry FFN: 3 -> geo_hidden (ReLU) -> geo_hidden
  Eigen::MatrixXd geo_w1;
  Eigen::VectorXd geo_b1;
  Eigen::MatrixXd geo_w2;
  Eigen::VectorXd geo_b2;

  std::vector<DgsaLayerWeights> layers;

  // projection FFN: 2*d_init -> d_model (ReLU) -> d_model
  Eigen::MatrixXd proj_w1;
  Eigen::VectorXd proj_b1;
  Eigen::MatrixXd proj_w2;
  Eigen::VectorXd proj_b2;

  Eigen::VectorXd cls_token;
  std::vector<ClassAttentionLayer> cls_layers;  // always 2

  // All tensors zero-valued with the shapes `config` implies.
  static EncoderWeights zeros(const EncoderConfig& config);

  // Visits every tensor in the fixed serialization order as
  // f(std::string_view name, TensorRole role, Eigen::MatrixXd& or Eigen::VectorXd&).
  template <class F>
  void for_each_tensor(F&& f);
  template <class F>
  void for_each_tensor(F&& f) const;
};

inline constexpr int kClassAttentionLayers = 2;

// Xavier-uniform matrices, zero biases, unit LayerNorm scale, c_CLS a
// normalized unit Gaussian draw. Fully determined by `seed`.
EncoderWeights init_weights(const EncoderConfig& config, std::uint64_t seed);

// Throws ShapeError when a tensor disagrees with the config.
void check_weights(const EncoderWeights& w);

Eigen::VectorXd sinusoidal_pe(double d, int pe_dim);

double distance_gate(double d, const GateWeights& gate);

Eigen::VectorXd initial_embed(const Node& node, const EncoderWeights& weights);

// Column k of `embeddings_in` belongs to g.nodes[k]; the result has the same
// layout. `adj` must be adjacency(g).
Eigen::MatrixXd dgsa_layer(const SceneGraph& g, const std::vector<std::vector<Neighbor>>& adj,
                           const Eigen::MatrixXd& embeddings_in, const DgsaLayerWeights& layer,
                           const EncoderConfig& config);
Eigen::MatrixXd dgsa_layer(const SceneGraph& g, const Eigen::MatrixXd& embeddings_in,
                           const DgsaLayerWeights& layer, const EncoderConfig& config);

// Zero mean, unit variance (eps 1e-5), no affine part.
Eigen::VectorXd standardize(const Eigen::VectorXd& x);

Eigen::VectorXd layer_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& gamma,
                           const Eigen::VectorXd& beta);

struct GraphEncoding {
  Eigen::MatrixXd nodes;  // d_model x n, unit columns, column k = g.nodes[k]
  Eigen::VectorXd global;  // d_model, unit norm
};

// Class-token output for the given (unit) node embeddings.
Eigen::VectorXd class_token_embedding(const Eigen::MatrixXd& node_embeddings,
                                      const EncoderWeights& weights);

GraphEncoding encode_graph(const SceneGraph& g, const EncoderWeights& weights);

// ---------------------------------------------------------------------------

template <class F>
void EncoderWeights::for_each_tensor(F&& f) {
  f("geo.w1", TensorRole::weight, geo_w1);
  f("geo.b1", TensorRole::bias, geo_b1);
  f("geo.w2", TensorRole::weight, geo_w2);
  f("geo.b2", TensorRole::bias, geo_b2);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    auto& L = layers[l];
    f(p + "wq", TensorRole::weight, L.wq);
    f(p + "wk", TensorRole::weight, L.wk);
    f(p + "wv", TensorRole::weight, L.wv);
    f(p + "wq_nn", TensorRole::weight, L.wq_nn);
    f(p + "wk_nn", TensorRole::weight, L.wk_nn);
    f(p + "wv_nn", TensorRole::weight, L.wv_nn);
    f(p + "wo", TensorRole::weight, L.wo);
    f(p + "ln_gamma", TensorRole::norm_scale, L.ln_gamma);
    f(p + "ln_beta", TensorRole::norm_shift, L.ln_beta);
    f(p + "gate.w1", TensorRole::weight, L.gate.w1);
    f(p + "gate.b1", TensorRole::bias, L.gate.b1);
    f(p + "gate.w2", TensorRole::weight, L.gate.w2);
    f(p + "gate.b2", TensorRole::bias, L.gate.b2);
  }
  f("proj.w1", TensorRole::weight, proj_w1);
  f("proj.b1", TensorRole::bias, proj_b1);
  f("proj.w2", TensorRole::weight, proj_w2);
  f("proj.b2", TensorRole::bias, proj_b2);
  f("cls.token", TensorRole::token, cls_token);
  for (std::size_t l = 0; l < cls_layers.size(); ++l) {
    const std::string p = "cls.layer" + std::to_string(l) + ".";
    auto& L = cls_layers[l];
    f(p + "wq", TensorRole::weight, L.wq);
    f(p + "wk", TensorRole::weight, L.wk);
    f(p + "wv", TensorRole::weight, L.wv);
    f(p + "wo", TensorRole::weight, L.wo);
    f(p + "bo", TensorRole::bias, L.bo);
    f(p + "ln_gamma", TensorRole::norm_scale, L.ln_gamma);
    f(p + "ln_beta", TensorRole::norm_shift, L.ln_beta);
  }
}

template <class F>
void EncoderWeights::for_each_tensor(F&& f) const {
  const_cast<EncoderWeights*>(this)->for_each_tensor(
      [&](const std::string& name, TensorRole role, auto& t) { f(name, role, std::as_const(t)); });
}

}  // namespace sga
