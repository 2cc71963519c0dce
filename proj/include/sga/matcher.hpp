#pragma once

#include <Eigen/Core>

#include <string>

namespace sga {

enum class ScoreMode { raw, dual_softmax };

std::string to_string(ScoreMode mode);
ScoreMode score_mode_from_string(const std::string& s);

struct MatcherParams {
  double dustbin_logit = 0.0;
  double temperature = 0.05;
  ScoreMode mode = ScoreMode::dual_softmax;

  void validate() const;
};

// Every entry of P is in [kScoreFloor, 1], so -log P stays finite.
inline constexpr double kScoreFloor = 1e-9;

struct ScoreMatrix {
  Eigen::MatrixXd P;            // I x J
  Eigen::VectorXd dustbin_row;  // J: non-match mass of each B node
  Eigen::VectorXd dustbin_col;  // I: non-match mass of each A node
  ScoreMode mode = ScoreMode::dual_softmax;

  Eigen::Index rows() const { return P.rows(); }
  Eigen::Index cols() const { return P.cols(); }
};

// Embeddings are columns. Inputs are re-normalized; a zero column raises
// InvalidInput naming the side and index.
Eigen::MatrixXd cosine_scores(const Eigen::MatrixXd& emb_a, const Eigen::MatrixXd& emb_b);

ScoreMatrix score_matrix(const Eigen::MatrixXd& S, const MatcherParams& params);

}  // namespace sga
