#pragma once

#include "sga/matcher.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sga {

struct Match {
  int i = 0;  // index into graph A
  int j = 0;  // index into graph B
  double score = 0.0;

  bool operator==(const Match&) const = default;
};

struct MatchSet {
  std::vector<Match> pairs;      // sorted by (i, j)
  std::vector<int> unmatched_a;  // sorted
  std::vector<int> b_counts;     // matches per B index
  int iterations = 1;
  bool converged = true;
  // Upper bound on the real-valued objective gap caused by integer cost
  // rounding (MCF only).
  double objective_error_bound = 0.0;

  std::vector<std::pair<int, int>> pair_set() const;
};

struct MnnParams {
  double min_score = 0.1;

  void validate() const;
};

struct McfParams {
  double tau = 0.3;
  int top_k = 5;
  double c_unmatched = 2.0;
  double lambda = 1.0;
  std::optional<int> cap_max;  // nullopt = unlimited
  int max_iters = 5;
  std::int64_t cost_scale = 1'000'000;
  int src_cap = 1;  // > 1 permits one-to-many

  void validate() const;
};

MatchSet mnn_allocate(const ScoreMatrix& scores, const MnnParams& params);

// (i, j) pairs with P[i,j] >= tau and j among the top_k entries of row i;
// rank ties go to the lower column index. Sorted by (i, j).
std::vector<std::pair<int, int>> candidate_set(const Eigen::MatrixXd& P, double tau, int top_k);

// max over previous matches (k, l) of |d^A(i,k) - d^B(j,l)|; 0 when empty.
double geometry_penalty(int i, int j, std::span<const Match> prev_matches,
                        std::span<const Eigen::Vector3d> pos_a,
                        std::span<const Eigen::Vector3d> pos_b);

struct CandidateArc {
  int i = 0;
  int j = 0;
  double cost = 0.0;
};

struct FlowSolution {
  std::vector<std::pair<int, int>> matched;  // sorted by (i, j)
  std::vector<int> unmatched;                // A indices routed to the sink
  double total_cost = 0.0;                   // real-valued objective incl. unmatched cost
};

// Exact minimizer of sum F_ij c_ij + sum unmatched * c_unmatched subject to
// per-A conservation (src_cap units each) and per-B capacity cap_max.
FlowSolution solve_mcf(std::span<const CandidateArc> candidates, double c_unmatched,
                       std::optional<int> cap_max, int num_a, int num_b,
                       std::int64_t cost_scale = 1'000'000, int src_cap = 1);

MatchSet mcf_allocate(const ScoreMatrix& scores, std::span<const Eigen::Vector3d> pos_a,
                      std::span<const Eigen::Vector3d> pos_b, const McfParams& params);

}  // namespace sga
