// wbs2_sdll.hpp - WBS2 recursive interval sampling and steepest-drop
// selection of the number of changepoints.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "cptkit/binseg.hpp"
#include "cptkit/core.hpp"
#include "cptkit/cusum.hpp"
#include "cptkit/wbs.hpp"

namespace cptkit {

struct CandidateEntry {
  Interval interval;
  std::size_t location = 0;  // split b; the implied changepoint is b + 1
  double magnitude = 0.0;

  std::size_t changepoint() const noexcept { return location + 1; }
  bool operator==(const CandidateEntry&) const = default;
};

/// Entries ordered by non-increasing magnitude (ties by location).
struct SortedCandidateList {
  std::vector<CandidateEntry> entries;
  std::size_t series_length = 0;

  bool operator==(const SortedCandidateList&) const = default;
};

inline constexpr std::size_t kDefaultStageIntervals = 100;
// Gate multiplier, calibrated on null data; see README "Detector defaults".
inline constexpr double kDefaultSdllLambda = 1.3;
// Low level as a fraction of the gate. 1.0 makes the low level coincide with
// the gate.
inline constexpr double kDefaultSdllLowLevel = 0.3;

inline SortedCandidateList wbs2_candidates(const TimeSeries& series,
                                           std::size_t stage_intervals,
                                           RngSeed seed) {
  if (stage_intervals < 1) {
    throw Error(ErrorCode::InvalidParameter, "wbs2: M_stage must be positive");
  }
  const CusumEvaluator cusum(series);
  Rng rng(seed);
  SortedCandidateList out;
  out.series_length = series.length();

  std::vector<Interval> stack{{1, series.length()}};
  while (!stack.empty()) {
    const auto [s, e] = stack.back();
    stack.pop_back();
    if (e <= s) continue;

    const std::size_t width = e - s;
    // Number of sub-intervals [s', e'] of [s, e] with s' < e'.
    const std::size_t all = width * (width + 1) / 2;
    CandidateEntry best{{s, e}, s, -1.0};
    auto consider = [&](std::size_t a, std::size_t b) {
      const auto m = cusum.max_unchecked(a, b);
      if (m.magnitude > best.magnitude) best = {{a, b}, m.split, m.magnitude};
    };
    if (all <= stage_intervals) {
      for (std::size_t a = s; a < e; ++a) {
        for (std::size_t b = a + 1; b <= e; ++b) consider(a, b);
      }
    } else {
      std::size_t drawn = 0;
      while (drawn < stage_intervals) {
        const auto a = static_cast<std::size_t>(rng.uniform_int(s, e));
        const auto b = static_cast<std::size_t>(rng.uniform_int(s, e));
        if (b <= a) continue;
        consider(a, b);
        ++drawn;
      }
    }
    out.entries.push_back(best);
    stack.push_back({best.location + 1, e});
    stack.push_back({s, best.location});
  }

  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [](const CandidateEntry& x, const CandidateEntry& y) {
                     if (x.magnitude != y.magnitude) return x.magnitude > y.magnitude;
                     return x.location < y.location;
                   });
  return out;
}

struct SdllChoice {
  std::size_t count = 0;       // N hat
  std::size_t gate_index = 0;  // i0, 1-based: first magnitude below the low level
  double gate = 0.0;           // zeta
  double low_level = 0.0;
};

/// Steepest drop to low levels. Nothing is selected unless the top magnitude
/// reaches `gate`. Otherwise i0 is the first rank whose magnitude falls below
/// `low_fraction * gate`, and the count is the rank 1 <= i < i0 with the
/// largest ratio m_i / m_{i+1} (smallest i on ties; past the end of the list
/// the low level stands in for m_{i+1}). Zero magnitudes are always low, so a
/// zero gate is usable on noiseless input.
inline SdllChoice sdll_choose(std::span<const double> magnitudes, double gate,
                              double low_fraction = kDefaultSdllLowLevel) {
  SdllChoice choice;
  choice.gate = gate;
  choice.low_level = low_fraction * gate;
  const std::size_t n = magnitudes.size();
  choice.gate_index = 1;
  if (n == 0 || magnitudes[0] < gate || magnitudes[0] <= 0.0) return choice;

  std::size_t i0 = n + 1;
  for (std::size_t i = 1; i <= n; ++i) {
    const double m = magnitudes[i - 1];
    if (m < choice.low_level || m <= 0.0) {
      i0 = i;
      break;
    }
  }
  choice.gate_index = i0;

  double best_ratio = -1.0;
  for (std::size_t i = 1; i < i0; ++i) {
    const double upper = magnitudes[i - 1];
    const double lower = i < n ? magnitudes[i] : choice.low_level;
    const double ratio =
        lower > 0.0 ? upper / lower : std::numeric_limits<double>::infinity();
    if (ratio > best_ratio) {
      best_ratio = ratio;
      choice.count = i;
    }
  }
  return choice;
}

inline std::vector<double> candidate_magnitudes(const SortedCandidateList& list) {
  std::vector<double> out;
  out.reserve(list.entries.size());
  for (const auto& entry : list.entries) out.push_back(entry.magnitude);
  return out;
}

inline ChangepointConfig take_candidates(const SortedCandidateList& list,
                                         std::size_t count) {
  std::vector<std::size_t> times;
  times.reserve(count);
  for (std::size_t i = 0; i < count; ++i) times.push_back(list.entries[i].changepoint());
  return ChangepointConfig::from_unsorted(list.series_length, std::move(times));
}

inline ChangepointConfig sdll_select(const SortedCandidateList& candidates,
                                     double sigma_hat, double lambda,
                                     double low_fraction = kDefaultSdllLowLevel) {
  if (!(sigma_hat > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "sdll: sigma_hat must be positive");
  }
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "sdll: lambda must be positive");
  }
  if (!(low_fraction > 0.0 && low_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "sdll: low level fraction must be in (0, 1]");
  }
  if (candidates.entries.empty()) {
    return ChangepointConfig::empty(std::max<std::size_t>(candidates.series_length, 1));
  }
  const double gate = universal_threshold(lambda, candidates.series_length, sigma_hat);
  const auto magnitudes = candidate_magnitudes(candidates);
  return take_candidates(candidates, sdll_choose(magnitudes, gate, low_fraction).count);
}

struct Wbs2SdllParams {
  std::size_t stage_intervals = kDefaultStageIntervals;
  double lambda = kDefaultSdllLambda;
  double low_fraction = kDefaultSdllLowLevel;
};

struct Wbs2SdllResult {
  ChangepointConfig config;
  SortedCandidateList candidates;
  double sigma_hat = 0.0;
  double gate = 0.0;
};

inline Wbs2SdllResult wbs2_sdll_detect_full(const TimeSeries& series,
                                            const Wbs2SdllParams& params,
                                            RngSeed seed) {
  if (series.length() < 3) {
    throw Error(ErrorCode::InvalidLength, "wbs2-sdll: series length must be >= 3");
  }
  if (!(params.lambda > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "sdll: lambda must be positive");
  }
  if (!(params.low_fraction > 0.0 && params.low_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidParameter, "sdll: low level fraction must be in (0, 1]");
  }
  Wbs2SdllResult result;
  result.candidates = wbs2_candidates(series, params.stage_intervals, seed);
  result.sigma_hat = mad_sigma(series);
  // sigma_hat == 0 only when most differences vanish; the gate then
  // degenerates to 0 and only exactly-zero magnitudes count as low.
  result.gate = universal_threshold(params.lambda, series.length(), result.sigma_hat);
  const auto magnitudes = candidate_magnitudes(result.candidates);
  result.config = take_candidates(
      result.candidates, sdll_choose(magnitudes, result.gate, params.low_fraction).count);
  return result;
}

inline ChangepointConfig wbs2_sdll_detect(const TimeSeries& series,
                                          std::size_t stage_intervals, double lambda,
                                          RngSeed seed) {
  return wbs2_sdll_detect_full(series, {stage_intervals, lambda, kDefaultSdllLowLevel}, seed)
      .config;
}

}  // namespace cptkit
