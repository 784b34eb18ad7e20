// cusum.hpp - CUSUM contrast over subsegments [s, e] with split b.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cptkit/core.hpp"

namespace cptkit {

struct CusumEvaluation {
  std::size_t start = 0;  // s
  std::size_t end = 0;    // e
  std::size_t split = 0;  // b, last index of the left part
  double value = 0.0;
};

struct CusumMax {
  std::size_t split = 0;
  double magnitude = 0.0;
};

/// Prefix sums over the series, centred on X_1 so that constant stretches
/// produce exactly zero contrasts. The statistic is shift invariant, so the
/// centring does not change its value.
class CusumEvaluator {
 public:
  explicit CusumEvaluator(std::span<const double> values)
      : prefix_(values.size() + 1, 0.0) {
    const double origin = values.empty() ? 0.0 : values.front();
    for (std::size_t t = 0; t < values.size(); ++t) {
      prefix_[t + 1] = prefix_[t] + (values[t] - origin);
    }
  }

  explicit CusumEvaluator(const TimeSeries& series)
      : CusumEvaluator(series.values()) {}

  std::size_t length() const noexcept { return prefix_.size() - 1; }

  /// Sum of centred values over [s, e] (1-based, inclusive).
  double sum(std::size_t s, std::size_t e) const noexcept {
    return prefix_[e] - prefix_[s - 1];
  }

  /// sqrt((e-b)/(n(b-s+1))) * sum_{s..b} - sqrt((b-s+1)/(n(e-b))) * sum_{b+1..e}
  double stat(std::size_t s, std::size_t e, std::size_t b) const {
    if (!(1 <= s && s <= b && b < e && e <= length())) {
      throw Error(ErrorCode::InvalidInterval,
                  "cusum: need 1 <= s <= b < e <= T, got s=" + std::to_string(s) +
                      " b=" + std::to_string(b) + " e=" + std::to_string(e) +
                      " T=" + std::to_string(length()));
    }
    return stat_unchecked(s, e, b);
  }

  double stat_unchecked(std::size_t s, std::size_t e, std::size_t b) const noexcept {
    const double n = static_cast<double>(e - s + 1);
    const double left = static_cast<double>(b - s + 1);
    const double right = static_cast<double>(e - b);
    // written as a scaled difference of means: equal means cancel exactly
    return std::sqrt(left * right / n) * (sum(s, b) / left - sum(b + 1, e) / right);
  }

  /// Split in [s, e-1] maximising |stat|; ties go to the smallest split.
  CusumMax max(std::size_t s, std::size_t e) const {
    if (s < 1 || e > length() || e < s + 1) {
      throw Error(ErrorCode::DegenerateInterval,
                  "max_cusum: need 1 <= s < e <= T, got s=" + std::to_string(s) +
                      " e=" + std::to_string(e));
    }
    return max_unchecked(s, e);
  }

  CusumMax max_unchecked(std::size_t s, std::size_t e) const noexcept {
    CusumMax best{s, -1.0};
    for (std::size_t b = s; b < e; ++b) {
      const double magnitude = std::abs(stat_unchecked(s, e, b));
      if (magnitude > best.magnitude) best = {b, magnitude};
    }
    return best;
  }

 private:
  std::vector<double> prefix_;
};

inline double cusum_stat(const TimeSeries& series, std::size_t s, std::size_t e,
                         std::size_t b) {
  return CusumEvaluator(series).stat(s, e, b);
}

inline CusumMax max_cusum(const TimeSeries& series, std::size_t s, std::size_t e) {
  return CusumEvaluator(series).max(s, e);
}

}  // namespace cptkit
