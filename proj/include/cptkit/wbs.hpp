// wbs.hpp - wild binary segmentation with intervals drawn up front.
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "cptkit/binseg.hpp"
#include "cptkit/core.hpp"
#include "cptkit/cusum.hpp"

namespace cptkit {

struct Interval {
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Interval&) const = default;
  auto operator<=>(const Interval&) const = default;
};

using IntervalSet = std::vector<Interval>;

/// Draws `count` pairs uniformly from {(s, e) : 1 <= s < e <= T, e - s >= min_span}.
inline IntervalSet draw_intervals(std::size_t length, std::size_t count,
                                  std::size_t min_span, RngSeed seed) {
  if (count < 1 || min_span < 1 || length < min_span + 1) {
    throw Error(ErrorCode::InvalidParameter,
                "draw_intervals: need M >= 1, min_span >= 1 and T >= min_span + 1 (T=" +
                    std::to_string(length) + ", M=" + std::to_string(count) +
                    ", min_span=" + std::to_string(min_span) + ")");
  }
  Rng rng(seed);
  IntervalSet intervals;
  intervals.reserve(count);
  // Rejection from the uniform law on ordered pairs is uniform on the
  // feasible set.
  while (intervals.size() < count) {
    const auto s = static_cast<std::size_t>(rng.uniform_int(1, length));
    const auto e = static_cast<std::size_t>(rng.uniform_int(1, length));
    if (e > s && e - s >= min_span) intervals.push_back({s, e});
  }
  return intervals;
}

struct WbsParams {
  std::size_t intervals = 5000;
  double threshold_constant = kDefaultThresholdConstant;
  std::size_t min_span = 1;
};

struct WbsResult {
  ChangepointConfig config;
  double sigma_hat = 0.0;
  double threshold = 0.0;
};

/// Recursion over a fixed interval set with an explicit threshold.
inline ChangepointConfig wbs_from_intervals(const TimeSeries& series,
                                            const IntervalSet& intervals,
                                            double threshold) {
  const CusumEvaluator cusum(series);
  std::vector<CusumMax> scores;
  scores.reserve(intervals.size());
  for (const auto& iv : intervals) scores.push_back(cusum.max(iv.start, iv.end));

  std::vector<std::size_t> found;
  std::vector<Interval> stack{{1, series.length()}};
  while (!stack.empty()) {
    const auto [s, e] = stack.back();
    stack.pop_back();
    if (e <= s) continue;
    CusumMax best = cusum.max_unchecked(s, e);
    for (std::size_t k = 0; k < intervals.size(); ++k) {
      const auto& iv = intervals[k];
      if (iv.start >= s && iv.end <= e && scores[k].magnitude > best.magnitude) {
        best = scores[k];
      }
    }
    if (!(best.magnitude > threshold)) continue;
    found.push_back(best.split + 1);
    stack.push_back({best.split + 1, e});
    stack.push_back({s, best.split});
  }
  return ChangepointConfig::from_unsorted(series.length(), std::move(found));
}

inline WbsResult wbs_detect_full(const TimeSeries& series, const WbsParams& params,
                                 RngSeed seed) {
  const auto length = series.length();
  if (length < 3) {
    throw Error(ErrorCode::InvalidLength, "wbs: series length must be >= 3");
  }
  if (!(params.threshold_constant > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "wbs: C must be positive");
  }
  IntervalSet intervals;
  if (params.intervals > 0) {
    intervals = draw_intervals(length, params.intervals, params.min_span, seed);
  }
  intervals.push_back({1, length});
  WbsResult result;
  result.sigma_hat = mad_sigma(series);
  result.threshold =
      universal_threshold(params.threshold_constant, length, result.sigma_hat);
  result.config = wbs_from_intervals(series, intervals, result.threshold);
  return result;
}

inline ChangepointConfig wbs_detect(const TimeSeries& series, std::size_t intervals,
                                    double threshold_constant, RngSeed seed) {
  return wbs_detect_full(series, {intervals, threshold_constant, 1}, seed).config;
}

}  // namespace cptkit
