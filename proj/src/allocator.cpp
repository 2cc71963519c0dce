#include "sga/allocator.hpp"

#include "sga/errors.hpp"
#include "sga/min_cost_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sga {

std::vector<std::pair<int, int>> MatchSet::pair_set() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(pairs.size());
  for (const auto& m : pairs) out.emplace_back(m.i, m.j);
  return out;
}

void MnnParams::validate() const {
  if (!(min_score >= 0.0 && min_score <= 1.0)) {
    throw InvalidParameter("mnn.min_score must lie in [0, 1]");
  }
}

void McfParams::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidParameter("mcf.tau must lie in [0, 1]");
  if (top_k < 1) throw InvalidParameter("mcf.top_k must be >= 1");
  if (!std::isfinite(c_unmatched)) throw InvalidParameter("mcf.c_unmatched must be finite");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidParameter("mcf.lambda must be >= 0");
  if (cap_max && *cap_max < 1) throw InvalidParameter("mcf.cap_max must be >= 1 or unlimited");
  if (max_iters < 1) throw InvalidParameter("mcf.max_iters must be >= 1");
  if (cost_scale < 1) throw InvalidParameter("mcf.cost_scale must be >= 1");
  if (src_cap < 1) throw InvalidParameter("mcf.src_cap must be >= 1");
}

namespace {

MatchSet finish(std::vector<Match> pairs, int num_a, int num_b) {
  MatchSet out;
  std::sort(pairs.begin(), pairs.end(),
            [](const Match& x, const Match& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
  std::vector<char> matched(static_cast<std::size_t>(num_a), 0);
  out.b_counts.assign(static_cast<std::size_t>(num_b), 0);
  for (const auto& m : pairs) {
    matched[static_cast<std::size_t>(m.i)] = 1;
    ++out.b_counts[static_cast<std::size_t>(m.j)];
  }
  for (int i = 0; i < num_a; ++i) {
    if (!matched[static_cast<std::size_t>(i)]) out.unmatched_a.push_back(i);
  }
  out.pairs = std::move(pairs);
  return out;
}

}  // namespace

MatchSet mnn_allocate(const ScoreMatrix& scores, const MnnParams& params) {
  params.validate();
  const Eigen::MatrixXd& P = scores.P;
  const int I = static_cast<int>(P.rows());
  const int J = static_cast<int>(P.cols());

  // Eigen's maxCoeff(&index) keeps the first maximum, i.e. the lowest index.
  std::vector<int> best_col(static_cast<std::size_t>(I), -1);
  std::vector<int> best_row(static_cast<std::size_t>(J), -1);
  if (J > 0) {
    for (int i = 0; i < I; ++i) P.row(i).maxCoeff(&best_col[static_cast<std::size_t>(i)]);
  }
  if (I > 0) {
    for (int j = 0; j < J; ++j) P.col(j).maxCoeff(&best_row[static_cast<std::size_t>(j)]);
  }

  std::vector<Match> pairs;
  for (int i = 0; i < I; ++i) {
    const int j = best_col[static_cast<std::size_t>(i)];
    if (j < 0 || best_row[static_cast<std::size_t>(j)] != i) continue;
    if (P(i, j) >= params.min_score) pairs.push_back({i, j, P(i, j)});
  }
  return finish(std::move(pairs), I, J);
}

std::vector<std::pair<int, int>> candidate_set(const Eigen::MatrixXd& P, double tau, int top_k) {
  if (top_k < 1) throw InvalidParameter("candidate_set: top_k must be >= 1");
  std::vector<std::pair<int, int>> out;
  const int J = static_cast<int>(P.cols());
  std::vector<int> order(static_cast<std::size_t>(J));
  for (int i = 0; i < P.rows(); ++i) {
    std::iota(order.begin(), order.end(), 0);
    const int keep = std::min(top_k, J);
    std::partial_sort(order.begin(), order.begin() + keep, order.end(), [&](int a, int b) {
      if (P(i, a) != P(i, b)) return P(i, a) > P(i, b);
      return a < b;
    });
    std::vector<int> row(order.begin(), order.begin() + keep);
    std::sort(row.begin(), row.end());
    for (int j : row) {
      if (P(i, j) >= tau) out.emplace_back(i, j);
    }
  }
  return out;
}

double geometry_penalty(int i, int j, std::span<const Match> prev_matches,
                        std::span<const Eigen::Vector3d> pos_a,
                        std::span<const Eigen::Vector3d> pos_b) {
  double pen = 0.0;
  const auto& xi = pos_a[static_cast<std::size_t>(i)];
  const auto& yj = pos_b[static_cast<std::size_t>(j)];
  for (const auto& m : prev_matches) {
    const double da = (xi - pos_a[static_cast<std::size_t>(m.i)]).norm();
    const double db = (yj - pos_b[static_cast<std::size_t>(m.j)]).norm();
    pen = std::max(pen, std::abs(da - db));
  }
  return pen;
}

FlowSolution solve_mcf(std::span<const CandidateArc> candidates, double c_unmatched,
                       std::optional<int> cap_max, int num_a, int num_b, std::int64_t cost_scale,
                       int src_cap) {
  if (num_a < 0 || num_b < 0) throw InvalidParameter("solve_mcf: negative node count");
  if (cost_scale < 1) throw InvalidParameter("solve_mcf: cost_scale must be >= 1");
  if (src_cap < 1) throw InvalidParameter("solve_mcf: src_cap must be >= 1");
  if (cap_max && *cap_max < 1) throw InvalidParameter("solve_mcf: cap_max must be >= 1");

  auto scaled = [&](double c) {
    if (!std::isfinite(c)) throw InvalidInput("solve_mcf: non-finite cost");
    return static_cast<MinCostFlow::Cost>(std::llround(c * static_cast<double>(cost_scale)));
  };

  // node layout: source, A nodes, B nodes, sink
  const int source = 0;
  const int sink = 1 + num_a + num_b;
  MinCostFlow flow(sink + 1);
  const auto a_node = [](int i) { return 1 + i; };
  const auto b_node = [num_a](int j) { return 1 + num_a + j; };

  for (int i = 0; i < num_a; ++i) flow.add_arc(source, a_node(i), src_cap, 0);
  std::vector<int> cand_arc;
  cand_arc.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (c.i < 0 || c.i >= num_a || c.j < 0 || c.j >= num_b) {
      throw InvalidInput("solve_mcf: candidate index out of range");
    }
    cand_arc.push_back(flow.add_arc(a_node(c.i), b_node(c.j), 1, scaled(c.cost)));
  }
  std::vector<int> unmatched_arc;
  const MinCostFlow::Cost unmatched_cost = scaled(c_unmatched);
  for (int i = 0; i < num_a; ++i) {
    unmatched_arc.push_back(flow.add_arc(a_node(i), sink, src_cap, unmatched_cost));
  }
  const MinCostFlow::Capacity b_cap =
      cap_max ? *cap_max : static_cast<MinCostFlow::Capacity>(num_a) * src_cap;
  for (int j = 0; j < num_b; ++j) flow.add_arc(b_node(j), sink, b_cap, 0);

  flow.solve(source, sink, static_cast<MinCostFlow::Capacity>(num_a) * src_cap);

  FlowSolution sol;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (flow.flow(cand_arc[k]) > 0) {
      sol.matched.emplace_back(candidates[k].i, candidates[k].j);
      sol.total_cost += candidates[k].cost;
    }
  }
  for (int i = 0; i < num_a; ++i) {
    const auto units = flow.flow(unmatched_arc[static_cast<std::size_t>(i)]);
    if (units > 0) {
      sol.unmatched.push_back(i);
      sol.total_cost += static_cast<double>(units) * c_unmatched;
    }
  }
  std::sort(sol.matched.begin(), sol.matched.end());
  return sol;
}

MatchSet mcf_allocate(const ScoreMatrix& scores, std::span<const Eigen::Vector3d> pos_a,
                      std::span<const Eigen::Vector3d> pos_b, const McfParams& params) {
  params.validate();
  const Eigen::MatrixXd& P = scores.P;
  const int I = static_cast<int>(P.rows());
  const int J = static_cast<int>(P.cols());
  if (static_cast<int>(pos_a.size()) != I || static_cast<int>(pos_b.size()) != J) {
    throw ShapeError("mcf_allocate: position counts do not match the score matrix");
  }

  const auto cand = candidate_set(P, params.tau, params.top_k);
  std::vector<CandidateArc> arcs(cand.size());
  std::vector<Match> prev;
  MatchSet result;
  for (int t = 1; t <= params.max_iters; ++t) {
    for (std::size_t k = 0; k < cand.size(); ++k) {
      const auto [i, j] = cand[k];
      const double pen = params.lambda == 0.0 ? 0.0 : geometry_penalty(i, j, prev, pos_a, pos_b);
      arcs[k] = {i, j, -std::log(P(i, j)) + params.lambda * pen};
    }
    const FlowSolution sol =
        solve_mcf(arcs, params.c_unmatched, params.cap_max, I, J, params.cost_scale, params.src_cap);

    std::vector<Match> matches;
    matches.reserve(sol.matched.size());
    for (const auto& [i, j] : sol.matched) matches.push_back({i, j, P(i, j)});
    const bool same = t > 1 && matches == prev;

    result = finish(matches, I, J);
    result.iterations = t;
    result.converged = same;
    result.objective_error_bound =
        static_cast<double>(I) * params.src_cap / static_cast<double>(params.cost_scale);
    if (same) break;
    prev = std::move(matches);
  }
  return result;
}

}  // namespace sga
