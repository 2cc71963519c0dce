#include "sga/losses.hpp"

#include "sga/errors.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace sga {

namespace {

double log_sum_exp(const Eigen::Ref<const Eigen::VectorXd>& x) {
  const double m = x.maxCoeff();
  return m + std::log((x.array() - m).exp().sum());
}

}  // namespace

InfoNceResult info_nce(const Eigen::MatrixXd& S, std::span<const std::pair<int, int>> positives,
                       double temperature) {
  if (!(temperature > 0.0)) throw InvalidParameter("info_nce: temperature must be > 0");
  if (positives.empty()) throw InvalidInput("info_nce: at least one positive pair is required");
  std::set<int> rows, cols;
  for (const auto& [i, j] : positives) {
    if (i < 0 || i >= S.rows() || j < 0 || j >= S.cols()) {
      throw InvalidInput("info_nce: positive pair out of range");
    }
    if (!rows.insert(i).second || !cols.insert(j).second) {
      throw InvalidInput("info_nce: more than one positive in a row or column");
    }
  }

  const Eigen::MatrixXd logits = S / temperature;
  const double n = static_cast<double>(positives.size());
  InfoNceResult out;
  out.grad = Eigen::MatrixXd::Zero(S.rows(), S.cols());
  double row_ce = 0.0, col_ce = 0.0;
  for (const auto& [i, j] : positives) {
    const Eigen::VectorXd row = logits.row(i).transpose();
    const double lse_r = log_sum_exp(row);
    row_ce += lse_r - row[j];
    Eigen::VectorXd pr = (row.array() - lse_r).exp();
    pr[j] -= 1.0;
    out.grad.row(i) += pr.transpose() / (2.0 * n);

    const Eigen::VectorXd col = logits.col(j);
    const double lse_c = log_sum_exp(col);
    col_ce += lse_c - col[i];
    Eigen::VectorXd pc = (col.array() - lse_c).exp();
    pc[i] -= 1.0;
    out.grad.col(j) += pc / (2.0 * n);
  }
  out.loss = 0.5 * (row_ce / n + col_ce / n);
  out.grad /= temperature;
  return out;
}

TripletResult triplet_loss(const Eigen::VectorXd& anchor, const Eigen::VectorXd& positive,
                           const Eigen::VectorXd& negative, double margin) {
  if (anchor.size() != positive.size() || anchor.size() != negative.size()) {
    throw ShapeError("triplet_loss: embedding sizes differ");
  }
  if (!anchor.allFinite() || !positive.allFinite() || !negative.allFinite()) {
    throw InvalidInput("triplet_loss: non-finite embedding");
  }
  const Eigen::VectorXd ap = anchor - positive;
  const Eigen::VectorXd an = anchor - negative;
  const double d_ap = ap.norm();
  const double d_an = an.norm();

  TripletResult out;
  out.loss = std::max(d_ap - d_an + margin, 0.0);
  out.grad_anchor = Eigen::VectorXd::Zero(anchor.size());
  out.grad_positive = Eigen::VectorXd::Zero(anchor.size());
  out.grad_negative = Eigen::VectorXd::Zero(anchor.size());
  if (out.loss <= 0.0) return out;

  if (d_ap > 0.0) {
    out.grad_anchor += ap / d_ap;
    out.grad_positive -= ap / d_ap;
  }
  if (d_an > 0.0) {
    out.grad_anchor -= an / d_an;
    out.grad_negative += an / d_an;
  }
  return out;
}

std::size_t hard_negative_mine(const Eigen::VectorXd& anchor, std::size_t positive_index,
                               std::span<const Eigen::VectorXd> pool) {
  std::size_t best = pool.size();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pool.size(); ++k) {
    if (k == positive_index) continue;
    if (pool[k].size() != anchor.size()) throw ShapeError("hard_negative_mine: dimension mismatch");
    const double d = (anchor - pool[k]).norm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  if (best == pool.size()) throw InvalidInput("hard_negative_mine: no negative in the pool");
  return best;
}

std::vector<double> toy_embedding_fit(int num_a, int num_b,
                                      std::span<const std::pair<int, int>> positives,
                                      const ToyFitParams& params) {
  if (params.steps < 0 || params.dim < 1) throw InvalidParameter("toy_embedding_fit: bad params");
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(params.dim)));
  Eigen::MatrixXd ea(num_a, params.dim), eb(num_b, params.dim);
  for (Eigen::Index k = 0; k < ea.size(); ++k) ea.data()[k] = normal(rng);
  for (Eigen::Index k = 0; k < eb.size(); ++k) eb.data()[k] = normal(rng);

  std::vector<double> losses;
  losses.reserve(static_cast<std::size_t>(params.steps) + 1);
  InfoNceResult r = info_nce(ea * eb.transpose(), positives, params.temperature);
  losses.push_back(r.loss);
  for (int s = 0; s < params.steps; ++s) {
    const Eigen::MatrixXd grad_a = r.grad * eb;
    const Eigen::MatrixXd grad_b = r.grad.transpose() * ea;
    ea -= params.lr * grad_a;
    eb -= params.lr * grad_b;
    r = info_nce(ea * eb.transpose(), positives, params.temperature);
    losses.push_back(r.loss);
  }
  return losses;
}

std::vector<double> toy_embedding_fit(const AlignmentSample& sample, const ToyFitParams& params) {
  // info_nce wants one positive per column; keep the first A node of each
  // many-to-one group.
  std::vector<std::pair<int, int>> positives;
  std::set<int> used_b;
  for (const auto& [i, j] : gt_index_pairs(sample.gt, sample.graph_a, sample.graph_b)) {
    if (used_b.insert(j).second) positives.emplace_back(i, j);
  }
  if (positives.empty()) throw InvalidInput("toy_embedding_fit: sample has no positive pair");
  return toy_embedding_fit(static_cast<int>(sample.graph_a.size()),
                           static_cast<int>(sample.graph_b.size()), positives, params);
}

}  // namespace sga
