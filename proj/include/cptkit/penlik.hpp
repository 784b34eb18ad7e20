// penlik.hpp - penalized-likelihood selection (BIC, mBIC) for Gaussian mean
// shifts with unknown variance.
//
// The exact route is segment-neighbourhood dynamic programming over
// configurations whose segments all have at least `min_seg` points. The
// genetic-algorithm route searches binary chromosomes (one bit per admissible
// changepoint time) against the same objective, and hybrid_refine restricts
// the search to a detector's candidate times.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cptkit/core.hpp"
#include "cptkit/wbs2_sdll.hpp"

namespace cptkit {

enum class Penalty { Bic, Mbic };

inline std::string_view penalty_name(Penalty penalty) {
  return penalty == Penalty::Bic ? "BIC" : "mBIC";
}

struct PenalizedFit {
  ChangepointConfig config;
  double objective = 0.0;
  Penalty penalty = Penalty::Bic;
  double rss = 0.0;
  // rss is numerically zero and the objective is -infinity.
  bool degenerate = false;
};

struct RssRow {
  ChangepointConfig config;
  double rss = 0.0;
};

struct RssTable {
  std::vector<RssRow> rows;  // rows[m]: best configuration with m changepoints
  std::size_t min_seg = 2;
};

inline constexpr std::size_t kDefaultMinSegment = 2;
inline constexpr std::size_t kMaxChangepointsCap = 25;
// An rss at or below this fraction of the null rss counts as an exact fit.
inline constexpr double kDegenerateRssFraction = 1e-12;

/// O(1) segment residual sums of squares from prefix sums of X and X^2,
/// centred on X_1.
class SegmentCost {
 public:
  explicit SegmentCost(std::span<const double> values)
      : sum_(values.size() + 1, 0.0), sum_sq_(values.size() + 1, 0.0) {
    const double origin = values.empty() ? 0.0 : values.front();
    for (std::size_t t = 0; t < values.size(); ++t) {
      const double v = values[t] - origin;
      sum_[t + 1] = sum_[t] + v;
      sum_sq_[t + 1] = sum_sq_[t] + v * v;
    }
  }

  std::size_t length() const noexcept { return sum_.size() - 1; }

  /// RSS of [first, last], 1-based inclusive.
  double rss(std::size_t first, std::size_t last) const noexcept {
    const double n = static_cast<double>(last - first + 1);
    const double s = sum_[last] - sum_[first - 1];
    const double q = sum_sq_[last] - sum_sq_[first - 1];
    return std::max(0.0, q - s * s / n);
  }

  double rss(std::span<const std::size_t> times) const noexcept {
    double total = 0.0;
    std::size_t start = 1;
    for (auto t : times) {
      total += rss(start, t - 1);
      start = t;
    }
    return total + rss(start, length());
  }

 private:
  std::vector<double> sum_;
  std::vector<double> sum_sq_;
};

/// Direct two-pass segment RSS, independent of the prefix-sum route.
inline double segment_rss(const TimeSeries& series, const ChangepointConfig& config) {
  if (config.series_length() != series.length()) {
    throw Error(ErrorCode::InvalidComparison, "segment_rss: length mismatch");
  }
  const auto values = series.values();
  double total = 0.0;
  std::size_t start = 0;
  auto add_segment = [&](std::size_t first, std::size_t stop) {
    double mean = 0.0;
    for (std::size_t t = first; t < stop; ++t) mean += values[t];
    mean /= static_cast<double>(stop - first);
    for (std::size_t t = first; t < stop; ++t) {
      const double d = values[t] - mean;
      total += d * d;
    }
  };
  for (auto t : config.times()) {
    add_segment(start, t - 1);
    start = t - 1;
  }
  add_segment(start, values.size());
  return total;
}

inline std::vector<double> segment_means(const TimeSeries& series,
                                         const ChangepointConfig& config) {
  const auto values = series.values();
  std::vector<double> means;
  std::size_t start = 0;
  auto push = [&](std::size_t first, std::size_t stop) {
    double mean = 0.0;
    for (std::size_t t = first; t < stop; ++t) mean += values[t];
    means.push_back(mean / static_cast<double>(stop - first));
  };
  for (auto t : config.times()) {
    push(start, t - 1);
    start = t - 1;
  }
  push(start, values.size());
  return means;
}

/// BIC:  (T/2) ln(rss/T) + (m+1) ln T
/// mBIC: (T/2) ln(rss/T) + (3/2) m ln T + (1/2) sum_i ln(L_i/T)
template <typename Lengths>
double penalized_objective(Penalty penalty, std::size_t length, double rss,
                           const Lengths& segment_lengths) {
  const double n = static_cast<double>(length);
  const double m = static_cast<double>(std::size(segment_lengths)) - 1.0;
  const double fit = rss > 0.0 ? 0.5 * n * std::log(rss / n)
                               : -std::numeric_limits<double>::infinity();
  if (penalty == Penalty::Bic) return fit + (m + 1.0) * std::log(n);
  double spacing = 0.0;
  for (auto l : segment_lengths) spacing += std::log(static_cast<double>(l) / n);
  return fit + 1.5 * m * std::log(n) + 0.5 * spacing;
}

inline double penalized_objective(const TimeSeries& series,
                                  const ChangepointConfig& config, Penalty penalty) {
  return penalized_objective(penalty, series.length(), segment_rss(series, config),
                             config.segment_lengths());
}

inline std::size_t default_max_changepoints(std::size_t length, std::size_t min_seg) {
  return std::min<std::size_t>(length / min_seg - 1, kMaxChangepointsCap);
}

inline RssTable segment_rss_table(const TimeSeries& series, std::size_t m_max,
                                  std::size_t min_seg = kDefaultMinSegment) {
  const std::size_t n = series.length();
  if (min_seg < 2 || (m_max + 1) * min_seg > n) {
    throw Error(ErrorCode::InvalidParameter,
                "segment_rss_table: need min_seg >= 2 and (m_max + 1) * min_seg <= T "
                "(T=" + std::to_string(n) + ", m_max=" + std::to_string(m_max) +
                    ", min_seg=" + std::to_string(min_seg) + ")");
  }
  const SegmentCost cost(series.values());
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // best[m][j]: minimal rss of X_1..X_j split into m + 1 segments.
  // start[m][j]: first index of the last segment in that optimum.
  std::vector<std::vector<double>> best(m_max + 1, std::vector<double>(n + 1, kInf));
  std::vector<std::vector<std::size_t>> start(m_max + 1,
                                              std::vector<std::size_t>(n + 1, 0));
  for (std::size_t j = min_seg; j <= n; ++j) {
    best[0][j] = cost.rss(1, j);
    start[0][j] = 1;
  }
  for (std::size_t m = 1; m <= m_max; ++m) {
    for (std::size_t j = (m + 1) * min_seg; j <= n; ++j) {
      double row_best = kInf;
      std::size_t arg = 0;
      // last segment [i, j]; the prefix X_1..X_{i-1} holds m segments.
      for (std::size_t i = m * min_seg + 1; i + min_seg <= j + 1; ++i) {
        const double candidate = best[m - 1][i - 1] + cost.rss(i, j);
        if (candidate < row_best) {
          row_best = candidate;
          arg = i;
        }
      }
      best[m][j] = row_best;
      start[m][j] = arg;
    }
  }

  RssTable table;
  table.min_seg = min_seg;
  table.rows.reserve(m_max + 1);
  for (std::size_t m = 0; m <= m_max; ++m) {
    std::vector<std::size_t> times(m);
    std::size_t j = n;
    for (std::size_t k = m; k > 0; --k) {
      const std::size_t i = start[k][j];
      times[k - 1] = i;
      j = i - 1;
    }
    table.rows.push_back({ChangepointConfig(n, std::move(times)), best[m][n]});
  }
  return table;
}

namespace detail {

inline bool is_degenerate_rss(double rss, double null_rss) {
  return rss <= kDegenerateRssFraction * null_rss;
}

inline PenalizedFit make_fit(const TimeSeries& series, ChangepointConfig config,
                             Penalty penalty, double null_rss) {
  PenalizedFit fit;
  fit.penalty = penalty;
  fit.rss = segment_rss(series, config);
  fit.degenerate = is_degenerate_rss(fit.rss, null_rss);
  fit.objective = fit.degenerate
                      ? -std::numeric_limits<double>::infinity()
                      : penalized_objective(penalty, series.length(), fit.rss,
                                            config.segment_lengths());
  fit.config = std::move(config);
  return fit;
}

inline PenalizedFit select_from_table(const TimeSeries& series, Penalty penalty,
                                      std::size_t min_seg) {
  const std::size_t n = series.length();
  if (n < 6) {
    throw Error(ErrorCode::InvalidLength, "penalized selection needs T >= 6");
  }
  const auto table = segment_rss_table(series, default_max_changepoints(n, min_seg), min_seg);
  const double null_rss = table.rows.front().rss;

  std::size_t chosen = 0;
  double chosen_objective = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < table.rows.size(); ++m) {
    const auto& row = table.rows[m];
    const double objective =
        is_degenerate_rss(row.rss, null_rss)
            ? -std::numeric_limits<double>::infinity()
            : penalized_objective(penalty, n, row.rss, row.config.segment_lengths());
    if (objective < chosen_objective) {
      chosen_objective = objective;
      chosen = m;
    }
  }
  return make_fit(series, table.rows[chosen].config, penalty, segment_rss(series, table.rows[0].config));
}

}  // namespace detail

inline PenalizedFit select_bic(const TimeSeries& series,
                               std::size_t min_seg = kDefaultMinSegment) {
  return detail::select_from_table(series, Penalty::Bic, min_seg);
}

/// The spacing term is evaluated on each row's RSS-optimal configuration, so
/// this is exact for the RSS-optimal rows only; ga_optimize searches jointly.
inline PenalizedFit select_mbic(const TimeSeries& series,
                                std::size_t min_seg = kDefaultMinSegment) {
  return detail::select_from_table(series, Penalty::Mbic, min_seg);
}

struct GaParams {
  std::size_t population = 50;
  std::size_t generations = 200;
  double crossover = 0.8;
  double mutation = -1.0;      // per bit; negative means 1 / chromosome length
  std::size_t elitism = 2;
  double init_density = -1.0;  // per bit; negative means 2 / chromosome length
  std::size_t min_seg = kDefaultMinSegment;
  // Chromosomes placed first in the initial population, followed by the
  // empty configuration and then random members.
  std::vector<ChangepointConfig> initial;
};

namespace detail {

/// Genetic search over subsets of `admissible` (sorted changepoint times).
class GeneticSearch {
 public:
  GeneticSearch(const TimeSeries& series, Penalty penalty,
                std::vector<std::size_t> admissible, const GaParams& params)
      : series_(series),
        cost_(series.values()),
        penalty_(penalty),
        admissible_(std::move(admissible)),
        params_(params),
        max_changepoints_(default_max_changepoints(series.length(), params.min_seg)),
        null_rss_(cost_.rss(1, series.length())) {}

  PenalizedFit run(RngSeed seed) {
    Rng rng(seed);
    const std::size_t bits = admissible_.size();
    const std::size_t pop_size = std::max<std::size_t>(params_.population, 1);
    const double mutation =
        params_.mutation >= 0.0 ? params_.mutation
                                : (bits > 0 ? 1.0 / static_cast<double>(bits) : 0.0);
    const double density =
        params_.init_density >= 0.0
            ? params_.init_density
            : (bits > 0 ? std::min(0.5, 2.0 / static_cast<double>(bits)) : 0.0);

    std::vector<Member> population;
    population.reserve(pop_size);
    for (const auto& config : params_.initial) {
      if (population.size() == pop_size) break;
      population.push_back(evaluate(encode(config)));
    }
    if (population.size() < pop_size) population.push_back(evaluate(Chromosome(bits, 0)));
    while (population.size() < pop_size) {
      Chromosome genes(bits, 0);
      for (auto& g : genes) g = rng.uniform() < density ? 1 : 0;
      population.push_back(evaluate(std::move(genes)));
    }
    sort(population);

    for (std::size_t gen = 0; gen < params_.generations && bits > 0; ++gen) {
      std::vector<Member> next;
      next.reserve(pop_size);
      for (std::size_t k = 0; k < std::min(params_.elitism, pop_size); ++k) {
        next.push_back(population[k]);
      }
      while (next.size() < pop_size) {
        Chromosome child = tournament(population, rng).genes;
        if (rng.uniform() < params_.crossover && bits > 1) {
          const auto& other = tournament(population, rng).genes;
          const auto cut = static_cast<std::size_t>(rng.uniform_int(1, bits - 1));
          std::copy(other.begin() + static_cast<std::ptrdiff_t>(cut), other.end(),
                    child.begin() + static_cast<std::ptrdiff_t>(cut));
        }
        for (auto& g : child) {
          if (rng.uniform() < mutation) g ^= 1;
        }
        next.push_back(evaluate(std::move(child)));
      }
      population = std::move(next);
      sort(population);
    }

    return make_fit(series_, ChangepointConfig(series_.length(), decode(population.front().genes)),
                    penalty_, segment_rss(series_, ChangepointConfig::empty(series_.length())));
  }

 private:
  using Chromosome = std::vector<std::uint8_t>;

  struct Member {
    Chromosome genes;
    double objective = 0.0;
    std::size_t count = 0;
  };

  static bool better(const Member& a, const Member& b) {
    if (a.objective != b.objective) return a.objective < b.objective;
    return a.count < b.count;
  }

  static void sort(std::vector<Member>& population) {
    std::stable_sort(population.begin(), population.end(), better);
  }

  static const Member& tournament(const std::vector<Member>& population, Rng& rng) {
    const auto& a = population[rng.uniform_int(0, population.size() - 1)];
    const auto& b = population[rng.uniform_int(0, population.size() - 1)];
    return better(b, a) ? b : a;
  }

  Chromosome encode(const ChangepointConfig& config) const {
    Chromosome genes(admissible_.size(), 0);
    for (auto t : config.times()) {
      const auto it = std::lower_bound(admissible_.begin(), admissible_.end(), t);
      if (it != admissible_.end() && *it == t) genes[static_cast<std::size_t>(it - admissible_.begin())] = 1;
    }
    return genes;
  }

  std::vector<std::size_t> decode(const Chromosome& genes) const {
    std::vector<std::size_t> times;
    for (std::size_t k = 0; k < genes.size(); ++k) {
      if (genes[k]) times.push_back(admissible_[k]);
    }
    return times;
  }

  // Drops set bits that would create a segment shorter than min_seg.
  void repair(Chromosome& genes) const {
    const std::size_t min_seg = params_.min_seg;
    std::size_t segment_start = 1;
    std::size_t last_kept = genes.size();
    for (std::size_t k = 0; k < genes.size(); ++k) {
      if (!genes[k]) continue;
      if (admissible_[k] - segment_start < min_seg) {
        genes[k] = 0;
      } else {
        segment_start = admissible_[k];
        last_kept = k;
      }
    }
    if (last_kept < genes.size() && series_.length() + 1 - segment_start < min_seg) {
      genes[last_kept] = 0;
    }
  }

  Member evaluate(Chromosome genes) const {
    repair(genes);
    Member member;
    const auto times = decode(genes);
    member.count = times.size();
    if (times.size() > max_changepoints_) {
      member.objective = std::numeric_limits<double>::infinity();
    } else {
      const double rss = cost_.rss(times);
      if (is_degenerate_rss(rss, null_rss_)) {
        member.objective = -std::numeric_limits<double>::infinity();
      } else {
        member.objective = penalized_objective(
            penalty_, series_.length(), rss,
            ChangepointConfig(series_.length(), times).segment_lengths());
      }
    }
    member.genes = std::move(genes);
    return member;
  }

  const TimeSeries& series_;
  SegmentCost cost_;
  Penalty penalty_;
  std::vector<std::size_t> admissible_;
  GaParams params_;
  std::size_t max_changepoints_;
  double null_rss_;
};

}  // namespace detail

inline PenalizedFit ga_optimize(const TimeSeries& series, Penalty penalty,
                                const GaParams& params, RngSeed seed) {
  if (series.length() < 6) {
    throw Error(ErrorCode::InvalidLength, "ga_optimize needs T >= 6");
  }
  if (params.min_seg < 2) {
    throw Error(ErrorCode::InvalidParameter, "ga_optimize: min_seg must be >= 2");
  }
  std::vector<std::size_t> admissible;
  for (std::size_t t = 2; t <= series.length(); ++t) admissible.push_back(t);
  return detail::GeneticSearch(series, penalty, std::move(admissible), params).run(seed);
}

inline constexpr std::size_t kExhaustiveCandidateLimit = 20;

/// Best penalized fit among subsets of the candidate changepoints: exhaustive
/// up to 20 distinct candidates, genetic search over the restricted
/// chromosome beyond that.
inline PenalizedFit hybrid_refine(const TimeSeries& series,
                                  const SortedCandidateList& candidates, Penalty penalty,
                                  RngSeed seed = RngSeed{0},
                                  std::size_t min_seg = kDefaultMinSegment) {
  const std::size_t n = series.length();
  std::vector<std::size_t> times;
  for (const auto& entry : candidates.entries) {
    const auto t = entry.changepoint();
    if (t >= 2 && t <= n) times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const double null_rss = segment_rss(series, ChangepointConfig::empty(n));
  if (times.size() > kExhaustiveCandidateLimit) {
    GaParams params;
    params.min_seg = min_seg;
    params.initial = {ChangepointConfig::empty(n)};
    return detail::GeneticSearch(series, penalty, std::move(times), params).run(seed);
  }

  const SegmentCost cost(series.values());
  const std::size_t k = times.size();
  std::uint32_t best_mask = 0;
  double best_objective = std::numeric_limits<double>::infinity();
  std::size_t best_count = 0;
  std::vector<std::size_t> subset;
  std::vector<std::size_t> lengths;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
    subset.clear();
    lengths.clear();
    std::size_t start = 1;
    bool feasible = true;
    for (std::size_t b = 0; b < k && feasible; ++b) {
      if (!(mask >> b & 1U)) continue;
      feasible = times[b] - start >= min_seg;
      lengths.push_back(times[b] - start);
      subset.push_back(times[b]);
      start = times[b];
    }
    if (!feasible || n + 1 - start < min_seg) continue;
    lengths.push_back(n + 1 - start);
    const double rss = cost.rss(subset);
    const double objective = detail::is_degenerate_rss(rss, null_rss)
                                 ? -std::numeric_limits<double>::infinity()
                                 : penalized_objective(penalty, n, rss, lengths);
    if (objective < best_objective ||
        (objective == best_objective && subset.size() < best_count)) {
      best_objective = objective;
      best_mask = mask;
      best_count = subset.size();
    }
  }
  std::vector<std::size_t> chosen;
  for (std::size_t b = 0; b < k; ++b) {
    if (best_mask >> b & 1U) chosen.push_back(times[b]);
  }
  return detail::make_fit(series, ChangepointConfig(n, std::move(chosen)), penalty, null_rss);
}

}  // namespace cptkit
