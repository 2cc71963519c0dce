#include "sga/matcher.hpp"

#include "sga/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sga {

std::string to_string(ScoreMode mode) {
  return mode == ScoreMode::raw ? "raw" : "dual_softmax";
}

ScoreMode score_mode_from_string(const std::string& s) {
  if (s == "raw") return ScoreMode::raw;
  if (s == "dual_softmax") return ScoreMode::dual_softmax;
  throw InvalidParameter("unknown matcher mode '" + s + "'");
}

void MatcherParams::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidParameter("matcher.temperature must be > 0");
  }
  if (std::isnan(dustbin_logit)) throw InvalidParameter("matcher.dustbin_logit must not be NaN");
}

namespace {

Eigen::MatrixXd normalized_columns(const Eigen::MatrixXd& m, const char* side) {
  Eigen::MatrixXd out = m;
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const double norm = m.col(k).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw InvalidInput(std::string("cosine_scores: embedding ") + side + "[" +
                         std::to_string(k) + "] cannot be normalized");
    }
    out.col(k) /= norm;
  }
  return out;
}

}  // namespace

Eigen::MatrixXd cosine_scores(const Eigen::MatrixXd& emb_a, const Eigen::MatrixXd& emb_b) {
  if (emb_a.rows() != emb_b.rows()) {
    throw ShapeError("cosine_scores: embedding widths differ (" + std::to_string(emb_a.rows()) +
                     " vs " + std::to_string(emb_b.rows()) + ")");
  }
  const Eigen::MatrixXd a = normalized_columns(emb_a, "a");
  const Eigen::MatrixXd b = normalized_columns(emb_b, "b");
  return (a.transpose() * b).cwiseMax(-1.0).cwiseMin(1.0);
}

ScoreMatrix score_matrix(const Eigen::MatrixXd& S, const MatcherParams& params) {
  params.validate();
  if (!S.allFinite()) throw InvalidInput("score_matrix: non-finite similarity");
  const Eigen::Index I = S.rows();
  const Eigen::Index J = S.cols();

  ScoreMatrix out;
  out.mode = params.mode;
  if (params.mode == ScoreMode::raw) {
    out.P = ((S.array() + 1.0) / 2.0).max(kScoreFloor).min(1.0).matrix();
    const double bin = 1.0 / (1.0 + std::exp(-params.dustbin_logit));
    out.dustbin_row = Eigen::VectorXd::Constant(J, bin);
    out.dustbin_col = Eigen::VectorXd::Constant(I, bin);
    return out;
  }

  // Augmented logits: row I and column J are the dustbins.
  Eigen::MatrixXd z(I + 1, J + 1);
  z.topLeftCorner(I, J) = S / params.temperature;
  z.col(J).setConstant(params.dustbin_logit / params.temperature);
  z.row(I).setConstant(params.dustbin_logit / params.temperature);

  Eigen::MatrixXd r(I, J + 1);  // softmax over each real row
  for (Eigen::Index i = 0; i < I; ++i) {
    const double m = z.row(i).maxCoeff();
    r.row(i) = (z.row(i).array() - m).exp();
    r.row(i) /= r.row(i).sum();
  }
  Eigen::MatrixXd c(I + 1, J);  // softmax over each real column
  for (Eigen::Index j = 0; j < J; ++j) {
    const double m = z.col(j).maxCoeff();
    c.col(j) = (z.col(j).array() - m).exp();
    c.col(j) /= c.col(j).sum();
  }

  out.P = (r.leftCols(J).array() * c.topRows(I).array()).max(kScoreFloor).min(1.0).matrix();
  out.dustbin_col = r.col(J);
  out.dustbin_row = c.row(I).transpose();
  return out;
}

}  // namespace sga
