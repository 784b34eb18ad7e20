// core.hpp - shared domain types, deterministic random generation, synthetic
// signals and the difference-based MAD noise estimator.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cptkit {

enum class ErrorCode {
  InvalidLength,
  InvalidParameter,
  InsufficientData,
  InvalidInterval,
  DegenerateInterval,
  InvalidComparison,
  InvalidConfig,
  UnknownMethod,
  Unreadable,
  Parse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Observed sequence X_1..X_T. Indices in the public API are 1-based.
class TimeSeries {
 public:
  TimeSeries() = default;

  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw Error(ErrorCode::InvalidLength,
                  "time series needs at least 2 observations, got " +
                      std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw Error(ErrorCode::InvalidParameter,
                    "non-finite observation at index " + std::to_string(i + 1));
      }
    }
  }

  std::size_t length() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  /// 1-based access.
  double at(std::size_t t) const { return values_.at(t - 1); }

  bool operator==(const TimeSeries&) const = default;

 private:
  std::vector<double> values_;
};

/// A changepoint time is the first index of a new segment, so every time lies
/// in [2, T] and position 1 is never a changepoint.
class ChangepointConfig {
 public:
  ChangepointConfig() = default;

  ChangepointConfig(std::size_t series_length, std::vector<std::size_t> times)
      : times_(std::move(times)), series_length_(series_length) {
    if (series_length_ < 1) {
      throw Error(ErrorCode::InvalidLength, "series length must be positive");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
      const auto t = times_[i];
      if (t < 2 || t > series_length_) {
        throw Error(ErrorCode::InvalidParameter,
                    "changepoint time " + std::to_string(t) +
                        " outside [2, " + std::to_string(series_length_) + "]");
      }
      if (i > 0 && times_[i - 1] >= t) {
        throw Error(ErrorCode::InvalidParameter,
                    "changepoint times must be strictly increasing");
      }
    }
  }

  static ChangepointConfig empty(std::size_t series_length) {
    return ChangepointConfig(series_length, {});
  }

  /// Sorts and deduplicates before validating.
  static ChangepointConfig from_unsorted(std::size_t series_length,
                                         std::vector<std::size_t> times) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return ChangepointConfig(series_length, std::move(times));
  }

  std::size_t count() const noexcept { return times_.size(); }
  bool is_empty() const noexcept { return times_.empty(); }
  std::size_t series_length() const noexcept { return series_length_; }
  const std::vector<std::size_t>& times() const noexcept { return times_; }

  /// Segment lengths L_0..L_m; they sum to T.
  std::vector<std::size_t> segment_lengths() const {
    std::vector<std::size_t> lengths;
    lengths.reserve(times_.size() + 1);
    std::size_t start = 1;
    for (auto t : times_) {
      lengths.push_back(t - start);
      start = t;
    }
    lengths.push_back(series_length_ + 1 - start);
    return lengths;
  }

  bool operator==(const ChangepointConfig&) const = default;

 private:
  std::vector<std::size_t> times_;
  std::size_t series_length_ = 1;
};

struct RngSeed {
  std::uint64_t value = 0;

  bool operator==(const RngSeed&) const = default;
};

namespace detail {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Small deterministic generator (splitmix64 stream). The standard library
/// distributions are implementation-defined, so uniform and normal variates
/// are produced here to keep seeded output identical across toolchains.
class Rng {
 public:
  explicit Rng(RngSeed seed) noexcept : state_(seed.value) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::splitmix64_mix(state_);
  }

  /// Uniform on [0, 1).
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer on [lo, hi], unbiased (rejection on the top range).
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
    const std::uint64_t span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max()) return next_u64();
    const std::uint64_t range = span + 1;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    return lo + draw % range;
  }

  /// Standard normal via the Marsaglia polar method.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Derives a child seed from a parent seed and a counter. For a fixed parent
/// the map counter -> child is a bijection on 64-bit integers, so distinct
/// counters never collide.
inline constexpr RngSeed derive_seed(RngSeed parent,
                                     std::uint64_t counter) noexcept {
  return RngSeed{detail::splitmix64_mix(counter + detail::splitmix64_mix(parent.value))};
}

inline TimeSeries gen_null(std::size_t length, RngSeed seed) {
  if (length < 2) {
    throw Error(ErrorCode::InvalidLength,
                "gen_null: length must be >= 2, got " + std::to_string(length));
  }
  Rng rng(seed);
  std::vector<double> values(length);
  for (auto& v : values) v = rng.normal();
  return TimeSeries(std::move(values));
}

struct TeethSpec {
  std::size_t length = 200;
  std::size_t period = 20;
  double amplitude = 1.0;
  double sigma = 0.3;
};

struct SignalWithTruth {
  TimeSeries series;
  ChangepointConfig truth;
};

/// Mean alternates 0, amplitude, 0, ... every `period` observations.
inline SignalWithTruth gen_teeth(const TeethSpec& spec, RngSeed seed) {
  if (spec.period < 2) {
    throw Error(ErrorCode::InvalidParameter,
                "gen_teeth: period must be >= 2, got " + std::to_string(spec.period));
  }
  if (spec.length < 2 * spec.period) {
    throw Error(ErrorCode::InvalidParameter,
                "gen_teeth: length must be at least 2 * period");
  }
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.amplitude)) {
    throw Error(ErrorCode::InvalidParameter,
                "gen_teeth: sigma must be non-negative and amplitude finite");
  }
  Rng rng(seed);
  std::vector<double> values(spec.length);
  std::vector<std::size_t> times;
  for (std::size_t t = 1; t <= spec.length; ++t) {
    const bool high = ((t - 1) / spec.period) % 2 == 1;
    const double mean = high ? spec.amplitude : 0.0;
    values[t - 1] = spec.sigma > 0.0 ? mean + spec.sigma * rng.normal() : mean;
    if (t > 1 && (t - 1) % spec.period == 0) times.push_back(t);
  }
  return {TimeSeries(std::move(values)),
          ChangepointConfig(spec.length, std::move(times))};
}

inline constexpr double kMadNormalConsistency = 0.6745;

/// sigma_hat = median(|X_{t+1} - X_t|) / (0.6745 * sqrt(2)).
inline double mad_sigma(std::span<const double> values) {
  if (values.size() < 3) {
    throw Error(ErrorCode::InsufficientData,
                "mad_sigma: need at least 3 observations, got " +
                    std::to_string(values.size()));
  }
  std::vector<double> diffs(values.size() - 1);
  for (std::size_t t = 0; t + 1 < values.size(); ++t) {
    diffs[t] = std::abs(values[t + 1] - values[t]);
  }
  const std::size_t n = diffs.size();
  const std::size_t mid = n / 2;
  std::nth_element(diffs.begin(), diffs.begin() + mid, diffs.end());
  double median = diffs[mid];
  if (n % 2 == 0) {
    const double lower = *std::max_element(diffs.begin(), diffs.begin() + mid);
    median = 0.5 * (lower + median);
  }
  return median / (kMadNormalConsistency * std::sqrt(2.0));
}

inline double mad_sigma(const TimeSeries& series) {
  return mad_sigma(series.values());
}

}  // namespace cptkit
