#include "sga/encoder.hpp"

#include "sga/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace sga {

namespace {

constexpr double kLayerNormEps = 1e-5;

double sigmoid(double x) {
  // Keep the result strictly inside (0, 1) even where exp saturates.
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  return std::clamp(s, lo, hi);
}

Eigen::VectorXd relu(const Eigen::VectorXd& x) { return x.cwiseMax(0.0); }

// In-place numerically stable softmax.
void softmax(Eigen::Ref<Eigen::VectorXd> x) {
  const double m = x.maxCoeff();
  x = (x.array() - m).exp();
  x /= x.sum();
}

void require_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                   const std::string& name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(name + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                     ", got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}


}  // namespace

Eigen::VectorXd standardize(const Eigen::VectorXd& x) {
  const double mean = x.mean();
  const Eigen::ArrayXd centered = x.array() - mean;
  return (centered / std::sqrt(centered.square().mean() + kLayerNormEps)).matrix();
}

void EncoderConfig::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidParameter("encoder config: " + msg); };
  if (pe_dim <= 0 || pe_dim % 2 != 0) fail("pe_dim must be a positive even integer");
  if (heads < 1) fail("heads must be >= 1");
  if (layers < 1) fail("layers must be >= 1");
  if (d_model < 1 || d_model % heads != 0) fail("d_model must be a positive multiple of heads");
  if (gate_hidden < 1) fail("gate_hidden must be >= 1");
  if (geo_hidden < 1) fail("geo_hidden must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (feature_dims.vl < 1 || feature_dims.t < 1) fail("feature_dims must be positive");
}

EncoderWeights EncoderWeights::zeros(const EncoderConfig& c) {
  c.validate();
  const int di = c.d_init();
  const int dh = c.pe_dim + di;
  const int dm = c.d_model;
  using M = Eigen::MatrixXd;
  using V = Eigen::VectorXd;

  EncoderWeights w;
  w.config = c;
  w.geo_w1 = M::Zero(c.geo_hidden, 3);
  w.geo_b1 = V::Zero(c.geo_hidden);
  w.geo_w2 = M::Zero(c.geo_hidden, c.geo_hidden);
  w.geo_b2 = V::Zero(c.geo_hidden);
  w.layers.resize(c.layers);
  for (auto& L : w.layers) {
    L.wq = M::Zero(dm, di);
    L.wk = M::Zero(dm, dh);
    L.wv = M::Zero(dm, dh);
    L.wq_nn = M::Zero(dm, dh);
    L.wk_nn = M::Zero(dm, dh);
    L.wv_nn = M::Zero(dm, dh);
    L.wo = M::Zero(di, dm);
    L.ln_gamma = V::Ones(di);
    L.ln_beta = V::Zero(di);
    L.gate.w1 = M::Zero(c.gate_hidden, 1);
    L.gate.b1 = V::Zero(c.gate_hidden);
    L.gate.w2 = M::Zero(1, c.gate_hidden);
    L.gate.b2 = V::Zero(1);
  }
  w.proj_w1 = M::Zero(dm, 2 * di);
  w.proj_b1 = V::Zero(dm);
  w.proj_w2 = M::Zero(dm, dm);
  w.proj_b2 = V::Zero(dm);
  w.cls_token = V::Zero(dm);
  w.cls_layers.resize(kClassAttentionLayers);
  for (auto& L : w.cls_layers) {
    L.wq = M::Zero(dm, dm);
    L.wk = M::Zero(dm, dm);
    L.wv = M::Zero(dm, dm);
    L.wo = M::Zero(dm, dm);
    L.bo = V::Zero(dm);
    L.ln_gamma = V::Ones(dm);
    L.ln_beta = V::Zero(dm);
  }
  return w;
}

EncoderWeights init_weights(const EncoderConfig& config, std::uint64_t seed) {
  EncoderWeights w = EncoderWeights::zeros(config);
  w.seed = seed;
  std::mt19937_64 rng(seed);
  w.for_each_tensor([&](const std::string&, TensorRole role, auto& t) {
    using T = std::decay_t<decltype(t)>;
    switch (role) {
      case TensorRole::weight: {
        if constexpr (std::is_same_v<T, Eigen::MatrixXd>) {
          const double bound = std::sqrt(6.0 / static_cast<double>(t.rows() + t.cols()));
          std::uniform_real_distribution<double> u(-bound, bound);
          for (Eigen::Index r = 0; r < t.rows(); ++r) {
            for (Eigen::Index c = 0; c < t.cols(); ++c) t(r, c) = u(rng);
          }
        }
        break;
      }
      case TensorRole::bias:
      case TensorRole::norm_shift:
        t.setZero();
        break;
      case TensorRole::norm_scale:
        t.setOnes();
        break;
      case TensorRole::token: {
        std::normal_distribution<double> n(0.0, 1.0);
        for (Eigen::Index k = 0; k < t.size(); ++k) t(k) = n(rng);
        t.normalize();
        break;
      }
    }
  });
  return w;
}

void check_weights(const EncoderWeights& w) {
  const EncoderWeights ref = EncoderWeights::zeros(w.config);
  if (w.layers.size() != ref.layers.size()) {
    throw ShapeError("expected " + std::to_string(ref.layers.size()) + " attention layers, got " +
                     std::to_string(w.layers.size()));
  }
  if (w.cls_layers.size() != ref.cls_layers.size()) {
    throw ShapeError("expected " + std::to_string(ref.cls_layers.size()) +
                     " class-token layers, got " + std::to_string(w.cls_layers.size()));
  }
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  ref.for_each_tensor([&](const std::string&, TensorRole, const auto& t) {
    shapes.emplace_back(t.rows(), t.cols());
  });
  std::size_t k = 0;
  w.for_each_tensor([&](const std::string& name, TensorRole, const auto& t) {
    const auto [rows, cols] = shapes[k++];
    if (t.rows() != rows || t.cols() != cols) {
      throw ShapeError(name + ": expected " + std::to_string(rows) + "x" + std::to_string(cols) +
                       ", got " + std::to_string(t.rows()) + "x" + std::to_string(t.cols()));
    }
    if (!t.allFinite()) throw NumericError(name + ": non-finite entry");
  });
}

Eigen::VectorXd sinusoidal_pe(double d, int pe_dim) {
  if (!std::isfinite(d) || d < 0.0) throw InvalidInput("sinusoidal_pe: distance must be >= 0");
  if (pe_dim <= 0 || pe_dim % 2 != 0) throw InvalidParameter("sinusoidal_pe: pe_dim must be even");
  Eigen::VectorXd pe(pe_dim);
  for (int k = 0; k < pe_dim / 2; ++k) {
    const double freq = std::pow(10000.0, -2.0 * k / static_cast<double>(pe_dim));
    pe[2 * k] = std::sin(d * freq);
    pe[2 * k + 1] = std::cos(d * freq);
  }
  return pe;
}

double distance_gate(double d, const GateWeights& gate) {
  if (!std::isfinite(d) || d < 0.0) throw InvalidInput("distance_gate: distance must be >= 0");
  const Eigen::VectorXd hidden = relu(gate.w1.col(0) * d + gate.b1);
  return sigmoid(gate.w2.row(0).dot(hidden) + gate.b2[0]);
}

Eigen::VectorXd layer_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& gamma,
                           const Eigen::VectorXd& beta) {
  return (standardize(x).array() * gamma.array() + beta.array()).matrix();
}

Eigen::VectorXd initial_embed(const Node& node, const EncoderWeights& weights) {
  const EncoderConfig& c = weights.config;
  const auto& f = node.features;
  if (f.vl.size() != c.feature_dims.vl || f.t.size() != c.feature_dims.t) {
    throw ShapeError("node " + std::to_string(node.id) + ": feature dimensions (" +
                     std::to_string(f.vl.size()) + ", " + std::to_string(f.t.size()) +
                     ") do not match encoder config (" + std::to_string(c.feature_dims.vl) +
                     ", " + std::to_string(c.feature_dims.t) + ")");
  }
  Eigen::VectorXd out(c.d_init());
  out.head(c.feature_dims.vl) = f.vl;
  out.segment(c.feature_dims.vl, c.feature_dims.t) = f.t;
  const Eigen::VectorXd hidden = relu(weights.geo_w1 * f.geo + weights.geo_b1);
  out.tail(c.geo_hidden) = weights.geo_w2 * hidden + weights.geo_b2;
  return out;
}

Eigen::MatrixXd dgsa_layer(const SceneGraph& g, const Eigen::MatrixXd& embeddings_in,
                           const DgsaLayerWeights& layer, const EncoderConfig& config) {
  return dgsa_layer(g, adjacency(g), embeddings_in, layer, config);
}

Eigen::MatrixXd dgsa_layer(const SceneGraph& g, const std::vector<std::vector<Neighbor>>& adj,
                           const Eigen::MatrixXd& x, const DgsaLayerWeights& layer,
                           const EncoderConfig& config) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  const int di = config.d_init();
  const int pe = config.pe_dim;
  const int heads = config.heads;
  const int dh = config.d_head();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  require_shape(x, di, n, "dgsa_layer input");

  // h_ij = [PE(d_ij) | c_j], so W h_ij = W_pe PE(d_ij) + W_c c_j. The c_j half
  // is shared by every edge into j and is projected once per node.
  const Eigen::MatrixXd q = layer.wq * x;
  const Eigen::MatrixXd kc = layer.wk.rightCols(di) * x;
  const Eigen::MatrixXd vc = layer.wv.rightCols(di) * x;
  const Eigen::MatrixXd qnc = layer.wq_nn.rightCols(di) * x;
  const Eigen::MatrixXd knc = layer.wk_nn.rightCols(di) * x;
  const Eigen::MatrixXd vnc = layer.wv_nn.rightCols(di) * x;

  // PE projections for every directed adjacency entry at once.
  std::vector<Eigen::Index> offset(static_cast<std::size_t>(n) + 1, 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    offset[i + 1] = offset[i] + static_cast<Eigen::Index>(adj[static_cast<std::size_t>(i)].size());
  }
  const Eigen::Index total = offset[n];
  Eigen::MatrixXd pes(pe, total);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& nbrs = adj[static_cast<std::size_t>(i)];
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      pes.col(offset[i] + static_cast<Eigen::Index>(a)) = sinusoidal_pe(nbrs[a].d, pe);
    }
  }
  const Eigen::MatrixXd k_pe = layer.wk.leftCols(pe) * pes;
  const Eigen::MatrixXd v_pe = layer.wv.leftCols(pe) * pes;
  const Eigen::MatrixXd qn_pe = layer.wq_nn.leftCols(pe) * pes;
  const Eigen::MatrixXd kn_pe = layer.wk_nn.leftCols(pe) * pes;
  const Eigen::MatrixXd vn_pe = layer.wv_nn.leftCols(pe) * pes;

  Eigen::MatrixXd ctx = Eigen::MatrixXd::Zero(config.d_model, n);  // o_cn + o_nn per node
  Eigen::VectorXd o_cn(config.d_model), o_nn(config.d_model);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& nbrs = adj[static_cast<std::size_t>(i)];
    const Eigen::Index m = static_cast<Eigen::Index>(nbrs.size());
    const Eigen::Index off = offset[i];
    o_cn.setZero();
    o_nn.setZero();

    if (m > 0) {
      Eigen::VectorXd gate_c(m);
      for (Eigen::Index a = 0; a < m; ++a) gate_c[a] = distance_gate(nbrs[a].d, layer.gate);
      Eigen::MatrixXd k = k_pe.middleCols(off, m);
      Eigen::MatrixXd v = v_pe.middleCols(off, m);
      for (Eigen::Index a = 0; a < m; ++a) {
        k.col(a) += kc.col(nbrs[a].index);
        v.col(a) += vc.col(nbrs[a].index);
      }

      // center -> neighbor
      Eigen::VectorXd w(m);
      for (int h = 0; h < heads; ++h) {
        const auto qh = q.col(i).segment(h * dh, dh);
        for (Eigen::Index a = 0; a < m; ++a) {
          w[a] = gate_c[a] * qh.dot(k.col(a).segment(h * dh, dh)) * scale;
        }
        softmax(w);
        o_cn.segment(h * dh, dh) = v.middleRows(h * dh, dh) * w;
      }

      // neighbor -> neighbor, needs at least one j != k pair
      if (m > 1) {
        Eigen::MatrixXd qn = qn_pe.middleCols(off, m);
        Eigen::MatrixXd kn = kn_pe.middleCols(off, m);
        Eigen::MatrixXd vn = vn_pe.middleCols(off, m);
        for (Eigen::Index a = 0; a < m; ++a) {
          qn.col(a) += qnc.col(nbrs[a].index);
          kn.col(a) += knc.col(nbrs[a].index);
          vn.col(a) += vnc.col(nbrs[a].index);
        }
        Eigen::MatrixXd gate_nn = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index a = 0; a < m; ++a) {
          for (Eigen::Index b = a + 1; b < m; ++b) {
            const double d = pairwise_distance(g.nodes[nbrs[a].index].position,
                                               g.nodes[nbrs[b].index].position);
            gate_nn(a, b) = gate_nn(b, a) = distance_gate(d, layer.gate);
          }
        }
        Eigen::VectorXd beta(m - 1);
        Eigen::MatrixXd vsel(dh, m - 1);
        for (Eigen::Index a = 0; a < m; ++a) {
          for (int h = 0; h < heads; ++h) {
            const auto qh = qn.col(a).segment(h * dh, dh);
            Eigen::Index r = 0;
            for (Eigen::Index b = 0; b < m; ++b) {
              if (b == a) continue;
              beta[r] = gate_nn(a, b) * qh.dot(kn.col(b).segment(h * dh, dh)) * scale;
              vsel.col(r) = vn.col(b).segment(h * dh, dh);
              ++r;
            }
            softmax(beta);
            o_nn.segment(h * dh, dh) += vsel * beta;
          }
        }
        o_nn /= static_cast<double>(m);
      }
    }

    ctx.col(i) = o_cn + o_nn;
  }

  Eigen::MatrixXd out = x;
  out.noalias() += layer.wo * ctx;
  for (Eigen::Index i = 0; i < n; ++i) {
    out.col(i) = layer_norm(out.col(i), layer.ln_gamma, layer.ln_beta);
    if (!out.col(i).allFinite()) {
      throw NumericError("dgsa_layer: non-finite output at node " + std::to_string(g.nodes[i].id));
    }
  }
  return out;
}

namespace {

// One post-norm self-attention block over the token columns of `tokens`.
// When `first_only`, only the class-token column is updated and returned.
Eigen::MatrixXd class_attention(const Eigen::MatrixXd& tokens, const ClassAttentionLayer& L,
                                int heads, bool first_only) {
  const Eigen::Index dm = tokens.rows();
  const Eigen::Index dh = dm / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const Eigen::MatrixXd k = L.wk * tokens;
  const Eigen::MatrixXd v = L.wv * tokens;
  const Eigen::Index nq = first_only ? 1 : tokens.cols();
  const Eigen::MatrixXd q = L.wq * tokens.leftCols(nq);

  Eigen::MatrixXd out(dm, nq);
  Eigen::VectorXd o(dm), w(tokens.cols());
  for (Eigen::Index t = 0; t < nq; ++t) {
    for (int h = 0; h < heads; ++h) {
      w.noalias() = k.middleRows(h * dh, dh).transpose() * q.col(t).segment(h * dh, dh);
      w *= scale;
      softmax(w);
      o.segment(h * dh, dh).noalias() = v.middleRows(h * dh, dh) * w;
    }
    out.col(t) = layer_norm(tokens.col(t) + L.wo * o + L.bo, L.ln_gamma, L.ln_beta);
  }
  return out;
}

}  // namespace

Eigen::VectorXd class_token_embedding(const Eigen::MatrixXd& node_embeddings,
                                      const EncoderWeights& weights) {
  const int dm = weights.config.d_model;
  require_shape(node_embeddings, dm, node_embeddings.cols(), "node embeddings");
  Eigen::MatrixXd tokens(dm, node_embeddings.cols() + 1);
  tokens.col(0) = weights.cls_token;
  tokens.rightCols(node_embeddings.cols()) = node_embeddings;
  for (std::size_t l = 0; l < weights.cls_layers.size(); ++l) {
    const bool last = l + 1 == weights.cls_layers.size();
    tokens = class_attention(tokens, weights.cls_layers[l], weights.config.heads, last);
  }
  Eigen::VectorXd global = tokens.col(0);
  const double norm = global.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NumericError("class-token embedding has zero or non-finite norm");
  }
  return global / norm;
}

GraphEncoding encode_graph(const SceneGraph& g, const EncoderWeights& weights) {
  const EncoderConfig& c = weights.config;
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  const int di = c.d_init();

  Eigen::MatrixXd c0(di, n);
  for (Eigen::Index k = 0; k < n; ++k) c0.col(k) = initial_embed(g.nodes[k], weights);

  const auto adj = adjacency(g);
  Eigen::MatrixXd x = c0;
  for (const auto& layer : weights.layers) x = dgsa_layer(g, adj, x, layer, c);

  GraphEncoding enc;
  enc.nodes.resize(c.d_model, n);
  if (n > 0) {
    // The attention stream is LayerNorm-scaled while c_i carries raw feature
    // magnitudes; each half is standardized so neither swamps the other.
    Eigen::MatrixXd z(2 * di, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      z.col(k).head(di) = standardize(x.col(k));
      z.col(k).tail(di) = standardize(c0.col(k));
    }
    Eigen::MatrixXd hidden = weights.proj_w1 * z;
    hidden.colwise() += weights.proj_b1;
    hidden = hidden.cwiseMax(0.0);
    enc.nodes.noalias() = weights.proj_w2 * hidden;
    enc.nodes.colwise() += weights.proj_b2;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double norm = enc.nodes.col(k).norm();
      if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw NumericError("node " + std::to_string(g.nodes[k].id) +
                           ": embedding has zero or non-finite norm");
      }
      enc.nodes.col(k) /= norm;
    }
  }
  enc.global = class_token_embedding(enc.nodes, weights);
  return enc;
}

}  // namespace sga
