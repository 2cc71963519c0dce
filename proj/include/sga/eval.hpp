#pragma once

#include "sga/allocator.hpp"
#include "sga/sample.hpp"

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sga {

struct SampleMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int tn_nomatch = 0;  // A nodes without a gt partner that were left unmatched
};

// gt given as (A index, B index) pairs. Accuracy counts over the n_a A nodes.
SampleMetrics sample_metrics(const MatchSet& pred, std::span<const std::pair<int, int>> gt, int n_a);

struct MeanMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t count = 0;
};

MeanMetrics aggregate(std::span<const SampleMetrics> samples);

struct OverlapBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::optional<MeanMetrics> mean;  // absent when count == 0
};

inline constexpr int kOverlapBins = 10;

// Bin b covers [b/10, (b+1)/10); the last bin also takes overlap == 1.
int overlap_bin(double overlap);

std::array<OverlapBin, kOverlapBins> bin_by_overlap(std::span<const SampleMetrics> metrics,
                                                    std::span<const double> overlaps);

}  // namespace sga
