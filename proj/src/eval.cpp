#include "sga/eval.hpp"

#include "sga/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sga {

SampleMetrics sample_metrics(const MatchSet& pred, std::span<const std::pair<int, int>> gt, int n_a) {
  if (n_a <= 0) throw InvalidInput("sample_metrics: n_a must be > 0");
  const std::set<std::pair<int, int>> gt_set(gt.begin(), gt.end());
  std::set<std::pair<int, int>> pred_set;
  std::set<int> predicted_a, gt_a;
  for (const auto& m : pred.pairs) {
    if (m.i < 0 || m.i >= n_a) throw InvalidInput("sample_metrics: predicted index out of range");
    pred_set.emplace(m.i, m.j);
    predicted_a.insert(m.i);
  }
  for (const auto& [i, j] : gt_set) {
    if (i < 0 || i >= n_a) throw InvalidInput("sample_metrics: gt index out of range");
    gt_a.insert(i);
  }

  SampleMetrics s;
  for (const auto& p : pred_set) {
    if (gt_set.count(p)) {
      ++s.tp;
    } else {
      ++s.fp;
    }
  }
  s.fn = static_cast<int>(gt_set.size()) - s.tp;
  for (int i = 0; i < n_a; ++i) {
    if (!gt_a.count(i) && !predicted_a.count(i)) ++s.tn_nomatch;
  }

  const bool gt_empty = gt_set.empty();
  const bool pred_empty = pred_set.empty();
  if (gt_empty && pred_empty) {
    s.precision = s.recall = s.f1 = 1.0;
  } else if (gt_empty) {
    s.precision = 0.0;
    s.recall = 1.0;
    s.f1 = 0.0;
  } else if (pred_empty) {
    s.precision = 1.0;
    s.recall = 0.0;
    s.f1 = 0.0;
  } else {
    s.precision = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp);
    s.recall = static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn);
    s.f1 = s.tp == 0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  }
  s.accuracy = static_cast<double>(s.tp + s.tn_nomatch) / static_cast<double>(n_a);
  return s;
}

MeanMetrics aggregate(std::span<const SampleMetrics> samples) {
  if (samples.empty()) throw InvalidInput("aggregate: no samples");
  MeanMetrics m;
  for (const auto& s : samples) {
    m.accuracy += s.accuracy;
    m.precision += s.precision;
    m.recall += s.recall;
    m.f1 += s.f1;
  }
  const double n = static_cast<double>(samples.size());
  m.accuracy /= n;
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  m.count = samples.size();
  return m;
}

int overlap_bin(double overlap) {
  if (!(overlap >= 0.0 && overlap <= 1.0)) throw InvalidInput("overlap ratio must lie in [0, 1]");
  return std::min(kOverlapBins - 1, static_cast<int>(std::floor(overlap * kOverlapBins)));
}

std::array<OverlapBin, kOverlapBins> bin_by_overlap(std::span<const SampleMetrics> metrics,
                                                    std::span<const double> overlaps) {
  if (metrics.size() != overlaps.size()) {
    throw InvalidInput("bin_by_overlap: metrics and overlaps differ in length");
  }
  std::array<std::vector<SampleMetrics>, kOverlapBins> members;
  for (std::size_t k = 0; k < metrics.size(); ++k) {
    members[static_cast<std::size_t>(overlap_bin(overlaps[k]))].push_back(metrics[k]);
  }
  std::array<OverlapBin, kOverlapBins> bins;
  for (int b = 0; b < kOverlapBins; ++b) {
    auto& bin = bins[static_cast<std::size_t>(b)];
    bin.lo = b / static_cast<double>(kOverlapBins);
    bin.hi = (b + 1) / static_cast<double>(kOverlapBins);
    bin.count = members[static_cast<std::size_t>(b)].size();
    if (bin.count > 0) bin.mean = aggregate(members[static_cast<std::size_t>(b)]);
  }
  return bins;
}

}  // namespace sga
