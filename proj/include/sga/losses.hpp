#pragma once

#include "sga/sample.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sga {

struct InfoNceResult {
  double loss = 0.0;
  Eigen::MatrixXd grad;  // d loss / d S
};

// Bidirectional cross-entropy on S / temperature, averaged over the rows and
// over the columns that hold a positive. Positives are (row, col) pairs with
// at most one per row and per column.
InfoNceResult info_nce(const Eigen::MatrixXd& S, std::span<const std::pair<int, int>> positives,
                       double temperature = 0.07);

struct TripletResult {
  double loss = 0.0;
  Eigen::VectorXd grad_anchor;
  Eigen::VectorXd grad_positive;
  Eigen::VectorXd grad_negative;
};

// max(|a - p| - |a - n| + margin, 0). Zero subgradient in the inactive region
// and for a distance term whose difference vector vanishes.
TripletResult triplet_loss(const Eigen::VectorXd& anchor, const Eigen::VectorXd& positive,
                           const Eigen::VectorXd& negative, double margin = 0.5);

// Index of the pool entry closest to `anchor`, skipping `positive_index`.
std::size_t hard_negative_mine(const Eigen::VectorXd& anchor, std::size_t positive_index,
                               std::span<const Eigen::VectorXd> pool);

struct ToyFitParams {
  int steps = 200;
  double lr = 0.1;
  double temperature = 0.07;
  int dim = 16;
  std::uint64_t seed = 0;
};

// Gradient descent on free per-node embeddings (S = E_a E_b^T) under
// info_nce. Returns steps + 1 losses: the initial one, then one per step.
std::vector<double> toy_embedding_fit(int num_a, int num_b,
                                      std::span<const std::pair<int, int>> positives,
                                      const ToyFitParams& params);
std::vector<double> toy_embedding_fit(const AlignmentSample& sample, const ToyFitParams& params);

}  // namespace sga
