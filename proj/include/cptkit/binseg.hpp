// binseg.hpp - classical binary segmentation on the CUSUM contrast.
#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "cptkit/core.hpp"
#include "cptkit/cusum.hpp"

namespace cptkit {

inline constexpr double kDefaultThresholdConstant = 1.3;

/// C * sqrt(2 ln T) * sigma_hat
inline double universal_threshold(double constant, std::size_t length,
                                  double sigma_hat) {
  return constant * std::sqrt(2.0 * std::log(static_cast<double>(length))) * sigma_hat;
}

inline ChangepointConfig binary_segmentation(const TimeSeries& series,
                                             double threshold,
                                             std::size_t min_len = 2) {
  if (!(threshold >= 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "binseg: threshold must be >= 0");
  }
  if (min_len < 1) {
    throw Error(ErrorCode::InvalidParameter, "binseg: min_len must be positive");
  }
  const CusumEvaluator cusum(series);
  std::vector<std::size_t> found;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{1, series.length()}};
  while (!stack.empty()) {
    const auto [s, e] = stack.back();
    stack.pop_back();
    if (e - s + 1 < min_len || e <= s) continue;
    const auto best = cusum.max_unchecked(s, e);
    if (!(best.magnitude > threshold)) continue;
    found.push_back(best.split + 1);
    stack.push_back({best.split + 1, e});
    stack.push_back({s, best.split});
  }
  return ChangepointConfig::from_unsorted(series.length(), std::move(found));
}

/// Binary segmentation at the default threshold C * sqrt(2 ln T) * mad_sigma.
inline ChangepointConfig binary_segmentation_default(
    const TimeSeries& series, double constant = kDefaultThresholdConstant,
    std::size_t min_len = 2) {
  return binary_segmentation(
      series, universal_threshold(constant, series.length(), mad_sigma(series)),
      min_len);
}

}  // namespace cptkit
