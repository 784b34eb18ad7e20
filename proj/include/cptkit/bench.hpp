// bench.hpp - Monte-Carlo false-positive and recovery studies.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cptkit/binseg.hpp"
#include "cptkit/core.hpp"
#include "cptkit/distance.hpp"
#include "cptkit/penlik.hpp"
#include "cptkit/wbs.hpp"
#include "cptkit/wbs2_sdll.hpp"

namespace cptkit {

enum class Method { Bic, Mbic, Wbs, Wbs2Sdll, Binseg };

inline constexpr Method kAllMethods[] = {Method::Bic, Method::Mbic, Method::Wbs,
                                         Method::Wbs2Sdll, Method::Binseg};

inline std::string_view method_name(Method method) {
  switch (method) {
    case Method::Bic: return "bic";
    case Method::Mbic: return "mbic";
    case Method::Wbs: return "wbs";
    case Method::Wbs2Sdll: return "wbs2-sdll";
    case Method::Binseg: return "binseg";
  }
  return "unknown";
}

/// Row labels in the printed table.
inline std::string_view method_label(Method method) {
  switch (method) {
    case Method::Bic: return "BIC";
    case Method::Mbic: return "mBIC";
    case Method::Wbs: return "WBS";
    case Method::Wbs2Sdll: return "WBS-SDLL";
    case Method::Binseg: return "BinSeg";
  }
  return "unknown";
}

inline Method parse_method(std::string_view name) {
  for (auto method : kAllMethods) {
    if (method_name(method) == name) return method;
  }
  throw Error(ErrorCode::UnknownMethod,
              "unknown method '" + std::string(name) +
                  "'; valid methods: bic, mbic, wbs, wbs2-sdll, binseg");
}

struct DetectorSettings {
  WbsParams wbs;
  Wbs2SdllParams wbs2;
  double binseg_constant = kDefaultThresholdConstant;
  std::optional<double> binseg_threshold;  // absolute; overrides binseg_constant
  std::size_t binseg_min_len = 2;
  std::size_t min_seg = kDefaultMinSegment;
};

inline ChangepointConfig run_detector(Method method, const TimeSeries& series,
                                      const DetectorSettings& settings, RngSeed seed) {
  switch (method) {
    case Method::Bic: return select_bic(series, settings.min_seg).config;
    case Method::Mbic: return select_mbic(series, settings.min_seg).config;
    case Method::Wbs: return wbs_detect_full(series, settings.wbs, seed).config;
    case Method::Wbs2Sdll: return wbs2_sdll_detect_full(series, settings.wbs2, seed).config;
    case Method::Binseg: {
      const double threshold =
          settings.binseg_threshold
              ? *settings.binseg_threshold
              : universal_threshold(settings.binseg_constant, series.length(),
                                    mad_sigma(series));
      return binary_segmentation(series, threshold, settings.binseg_min_len);
    }
  }
  throw Error(ErrorCode::UnknownMethod, "unhandled method");
}

/// Seeds for one replication. The data seed depends on (T, rep) only, so all
/// methods see the same series; the detector seed also depends on the method.
/// Both are injective in their counters for a fixed master seed.
struct RepSeeds {
  RngSeed data;
  RngSeed detector;
};

inline RepSeeds rep_seeds(RngSeed master, Method method, std::size_t length,
                          std::size_t rep) {
  // counter layout: [tag:1][method:7][T:24][rep:32]
  const std::uint64_t body = (static_cast<std::uint64_t>(length & 0xFFFFFF) << 32) |
                             static_cast<std::uint64_t>(rep & 0xFFFFFFFFULL);
  const std::uint64_t data_counter = body;
  const std::uint64_t detector_counter =
      (std::uint64_t{1} << 63) |
      (static_cast<std::uint64_t>(static_cast<unsigned>(method) + 1) << 56) | body;
  return {derive_seed(master, data_counter), derive_seed(master, detector_counter)};
}

struct StudyRow {
  Method method = Method::Bic;
  std::size_t length = 0;
  std::size_t reps = 0;
  std::size_t reps_with_detection = 0;
  std::size_t exact_recoveries = 0;
  double distance_sum = 0.0;
  double detected_sum = 0.0;

  /// Fraction of replications with at least one detected changepoint; the
  /// false-positive rate when the truth is empty.
  double false_positive_rate() const {
    return static_cast<double>(reps_with_detection) / static_cast<double>(reps);
  }
  double avg_distance() const { return distance_sum / static_cast<double>(reps); }
  double avg_detected() const { return detected_sum / static_cast<double>(reps); }
  double exact_recovery_rate() const {
    return static_cast<double>(exact_recoveries) / static_cast<double>(reps);
  }

  bool operator==(const StudyRow&) const = default;
};

struct BenchmarkReport {
  std::string study;  // "null" or "teeth"
  std::uint64_t master_seed = 0;
  std::vector<StudyRow> rows;

  const StudyRow* find(Method method, std::size_t length) const {
    for (const auto& row : rows) {
      if (row.method == method && row.length == length) return &row;
    }
    return nullptr;
  }

  bool operator==(const BenchmarkReport&) const = default;
};

struct StudyOptions {
  DetectorSettings settings;
  unsigned threads = 0;  // 0: hardware concurrency
};

namespace detail {

struct RepOutcome {
  std::size_t detected = 0;
  double distance = 0.0;
  bool exact = false;
};

template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body body) {
  unsigned workers = threads ? threads : std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Per-rep outcomes are stored by index and reduced in order, so the result
// does not depend on scheduling.
template <typename MakeData>
StudyRow run_cell(Method method, std::size_t length, std::size_t reps, RngSeed master,
                  const StudyOptions& options, MakeData make_data) {
  std::vector<RepOutcome> outcomes(reps);
  parallel_for(reps, options.threads, [&](std::size_t rep) {
    const auto seeds = rep_seeds(master, method, length, rep);
    const auto [series, truth] = make_data(seeds.data);
    const auto estimate = run_detector(method, series, options.settings, seeds.detector);
    outcomes[rep] = {estimate.count(), config_distance(estimate, truth), estimate == truth};
  });
  StudyRow row;
  row.method = method;
  row.length = length;
  row.reps = reps;
  for (const auto& o : outcomes) {
    row.reps_with_detection += o.detected > 0 ? 1 : 0;
    row.exact_recoveries += o.exact ? 1 : 0;
    row.distance_sum += o.distance;
    row.detected_sum += static_cast<double>(o.detected);
  }
  return row;
}

}  // namespace detail

inline BenchmarkReport run_null_study(const std::vector<Method>& methods,
                                      const std::vector<std::size_t>& lengths,
                                      std::size_t reps, RngSeed master,
                                      const StudyOptions& options = {}) {
  if (reps < 1) throw Error(ErrorCode::InvalidConfig, "reps must be >= 1");
  for (auto t : lengths) {
    if (t < 10) {
      throw Error(ErrorCode::InvalidConfig,
                  "series lengths must be >= 10, got " + std::to_string(t));
    }
  }
  BenchmarkReport report{"null", master.value, {}};
  for (auto method : methods) {
    for (auto length : lengths) {
      report.rows.push_back(detail::run_cell(
          method, length, reps, master, options, [length](RngSeed seed) {
            return SignalWithTruth{gen_null(length, seed), ChangepointConfig::empty(length)};
          }));
    }
  }
  return report;
}

inline BenchmarkReport run_signal_study(const TeethSpec& spec,
                                        const std::vector<Method>& methods,
                                        std::size_t reps, RngSeed master,
                                        const StudyOptions& options = {}) {
  if (reps < 1) throw Error(ErrorCode::InvalidConfig, "reps must be >= 1");
  if (spec.length < 10) throw Error(ErrorCode::InvalidConfig, "series length must be >= 10");
  gen_teeth(spec, master);  // validates the generator parameters
  BenchmarkReport report{"teeth", master.value, {}};
  for (auto method : methods) {
    report.rows.push_back(detail::run_cell(method, spec.length, reps, master, options,
                                           [&spec](RngSeed seed) { return gen_teeth(spec, seed); }));
  }
  return report;
}

/// Methods as rows, one (False Positive, Distance) column pair per length.
inline std::string format_table(const BenchmarkReport& report) {
  std::vector<Method> methods;
  std::vector<std::size_t> lengths;
  for (const auto& row : report.rows) {
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
      methods.push_back(row.method);
    }
    if (std::find(lengths.begin(), lengths.end(), row.length) == lengths.end()) {
      lengths.push_back(row.length);
    }
  }
  const bool null_study = report.study == "null";
  const char* rate_label = null_study ? "False Positive" : "Any Detection";
  std::ostringstream out;
  out << (null_study ? "Average False Positive Rates and Distances"
                     : "Detection Rates and Distances to Truth")
      << " (master seed " << report.master_seed << ")\n";
  out << std::left << std::setw(12) << "Methods";
  for (auto t : lengths) {
    std::ostringstream head;
    head << "T=" << t;
    out << std::setw(32) << head.str();
  }
  out << "\n" << std::setw(12) << "";
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    out << std::setw(16) << rate_label << std::setw(16) << "Distance";
  }
  out << "\n" << std::fixed << std::setprecision(3);
  for (auto method : methods) {
    out << std::setw(12) << method_label(method);
    for (auto t : lengths) {
      if (const auto* row = report.find(method, t)) {
        out << std::setw(16) << row->false_positive_rate() << std::setw(16)
            << row->avg_distance();
      } else {
        out << std::setw(16) << "-" << std::setw(16) << "-";
      }
    }
    out << "\n";
  }
  return out.str();
}

inline std::string format_csv(const BenchmarkReport& report) {
  std::ostringstream out;
  out << "study,method,T,n_reps,false_positive_rate,avg_distance,avg_detected,"
         "exact_recovery_rate\n";
  out << std::setprecision(17);
  for (const auto& row : report.rows) {
    out << report.study << ',' << method_name(row.method) << ',' << row.length << ','
        << row.reps << ',' << row.false_positive_rate() << ',' << row.avg_distance()
        << ',' << row.avg_detected() << ',' << row.exact_recovery_rate() << '\n';
  }
  return out.str();
}

}  // namespace cptkit
