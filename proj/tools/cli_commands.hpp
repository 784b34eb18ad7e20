// cli_commands.hpp - subcommand bodies for the cptkit tool. Each returns the
// process exit status.
#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cptkit/cptkit.hpp"
#include "cptkit/io.hpp"

namespace cptkit::cli {

enum ExitCode : int {
  kOk = 0,
  kUnreadable = 2,
  kBadData = 3,
  kBadConfig = 4,
  kInternal = 5,
};

inline int exit_code_for(const Error& error) {
  switch (error.code()) {
    case ErrorCode::Unreadable: return kUnreadable;
    case ErrorCode::Parse: return kBadData;
    case ErrorCode::UnknownMethod:
    case ErrorCode::InvalidConfig: return kBadConfig;
    default: return kBadData;
  }
}

struct DetectorFlags {
  std::uint64_t seed = 1;
  std::size_t intervals = 5000;
  double threshold_c = kDefaultThresholdConstant;
  std::size_t m_stage = kDefaultStageIntervals;
  double lambda = kDefaultSdllLambda;
  double low_level = kDefaultSdllLowLevel;
  std::optional<double> threshold;  // absolute binseg threshold
  std::size_t min_len = 2;
  std::size_t min_seg = kDefaultMinSegment;

  DetectorSettings settings() const {
    DetectorSettings s;
    s.wbs.intervals = intervals;
    s.wbs.threshold_constant = threshold_c;
    s.wbs2.stage_intervals = m_stage;
    s.wbs2.lambda = lambda;
    s.wbs2.low_fraction = low_level;
    s.binseg_constant = threshold_c;
    s.binseg_threshold = threshold;
    s.binseg_min_len = min_len;
    s.min_seg = min_seg;
    return s;
  }
};

inline std::string validate(const DetectorFlags& flags) {
  if (!(flags.threshold_c > 0.0)) return "--threshold-c must be positive";
  if (flags.m_stage < 1) return "--m-stage must be >= 1";
  if (!(flags.lambda > 0.0)) return "--lambda must be positive";
  if (!(flags.low_level > 0.0 && flags.low_level <= 1.0)) return "--low-level must be in (0, 1]";
  if (flags.threshold && !(*flags.threshold >= 0.0)) return "--threshold must be >= 0";
  if (flags.min_len < 1) return "--min-len must be >= 1";
  if (flags.min_seg < 2) return "--min-seg must be >= 2";
  return {};
}

struct DetectOptions {
  std::string input;
  std::string method = "wbs2-sdll";
  std::string output;  // empty: stdout
  DetectorFlags detector;
};

inline io::DetectReport detect_report(Method method, const TimeSeries& series,
                                      const DetectorFlags& flags) {
  io::DetectReport report;
  report.method = std::string(method_name(method));
  const auto settings = flags.settings();
  const RngSeed seed{flags.seed};
  switch (method) {
    case Method::Binseg: {
      const double sigma = mad_sigma(series);
      const double threshold = settings.binseg_threshold
                                   ? *settings.binseg_threshold
                                   : universal_threshold(settings.binseg_constant,
                                                         series.length(), sigma);
      report.config = binary_segmentation(series, threshold, settings.binseg_min_len);
      report.diagnostics = {{"sigma_hat", sigma}, {"threshold", threshold}};
      break;
    }
    case Method::Wbs: {
      const auto r = wbs_detect_full(series, settings.wbs, seed);
      report.config = r.config;
      report.diagnostics = {{"sigma_hat", r.sigma_hat},
                            {"threshold", r.threshold},
                            {"intervals", static_cast<double>(settings.wbs.intervals)}};
      break;
    }
    case Method::Wbs2Sdll: {
      const auto r = wbs2_sdll_detect_full(series, settings.wbs2, seed);
      report.config = r.config;
      report.diagnostics = {{"sigma_hat", r.sigma_hat},
                            {"threshold", r.gate},
                            {"low_level", r.gate * settings.wbs2.low_fraction},
                            {"candidates", static_cast<double>(r.candidates.entries.size())}};
      break;
    }
    case Method::Bic:
    case Method::Mbic: {
      const auto fit = method == Method::Bic ? select_bic(series, settings.min_seg)
                                             : select_mbic(series, settings.min_seg);
      report.config = fit.config;
      report.diagnostics = {{"sigma_hat", mad_sigma(series)},
                            {"objective", fit.objective},
                            {"rss", fit.rss},
                            {"degenerate", fit.degenerate ? 1.0 : 0.0}};
      break;
    }
  }
  report.segment_means = segment_means(series, report.config);
  return report;
}

inline int write_text(const std::string& path, const std::string& text, std::ostream& out,
                      std::ostream& err) {
  if (path.empty()) {
    out << text;
    return kOk;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << text)) {
    err << "error: cannot write '" << path << "'\n";
    return kUnreadable;
  }
  return kOk;
}

inline int cmd_detect(const DetectOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const Method method = parse_method(options.method);
    if (const auto problem = validate(options.detector); !problem.empty()) {
      err << "error: " << problem << "\n";
      return kBadConfig;
    }
    const auto series = io::read_series(options.input);
    if (series.length() < 3 || ((method == Method::Bic || method == Method::Mbic) &&
                                series.length() < 6)) {
      err << "error: series too short for " << options.method << " (T=" << series.length()
          << ")\n";
      return kBadData;
    }
    const auto report = detect_report(method, series, options.detector);
    return write_text(options.output, io::format_detect_report(report), out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

struct DistanceOptions {
  std::string truth;
  std::string estimate;
  std::size_t length = 0;
};

inline int cmd_distance(const DistanceOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.length < 2) {
      err << "error: --length must be >= 2\n";
      return kBadConfig;
    }
    const auto truth = io::read_changepoints(options.truth, options.length);
    const auto estimate = io::read_changepoints(options.estimate, options.length);
    const auto d = config_distance_breakdown(truth, estimate);
    out << "distance: " << io::format_number(d.total()) << "\n";
    out << "count_term: " << d.count_term << "\n";
    out << "assignment_term: " << io::format_number(d.assignment_term()) << "\n";
    out << "matches:";
    for (const auto& [a, b] : d.matches) out << ' ' << a << '-' << b;
    out << "\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

inline constexpr std::uint64_t kTable1Seed = 20210101;

struct BenchOptions {
  bool table1 = false;
  std::vector<std::string> methods{"bic", "mbic", "wbs", "wbs2-sdll"};
  std::vector<std::size_t> lengths{100, 500};
  std::size_t reps = 1000;
  std::uint64_t seed = kTable1Seed;
  std::string out;  // path prefix for <out>.txt and <out>.csv
  unsigned threads = 0;
  bool teeth = false;
  TeethSpec teeth_spec;
  DetectorFlags detector;
};

inline int cmd_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  try {
    std::vector<Method> methods;
    for (const auto& name : options.methods) methods.push_back(parse_method(name));
    if (methods.empty()) throw Error(ErrorCode::InvalidConfig, "--methods: list is empty");
    if (options.reps < 1) throw Error(ErrorCode::InvalidConfig, "--reps: must be >= 1");
    if (!options.teeth && options.lengths.empty()) {
      throw Error(ErrorCode::InvalidConfig, "--lengths: list is empty");
    }
    for (auto t : options.lengths) {
      if (t < 10) {
        throw Error(ErrorCode::InvalidConfig,
                    "--lengths: every length must be >= 10, got " + std::to_string(t));
      }
    }
    if (const auto problem = validate(options.detector); !problem.empty()) {
      throw Error(ErrorCode::InvalidConfig, problem);
    }

    StudyOptions study;
    study.settings = options.detector.settings();
    study.threads = options.threads;
    BenchmarkReport report;
    if (options.teeth) {
      try {
        report = run_signal_study(options.teeth_spec, methods, options.reps,
                                  RngSeed{options.seed}, study);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidParameter) {
          throw Error(ErrorCode::InvalidConfig, std::string("--teeth: ") + e.what());
        }
        throw;
      }
    } else {
      report = run_null_study(methods, options.lengths, options.reps, RngSeed{options.seed},
                              study);
    }

    const auto table = format_table(report);
    out << table;
    if (!options.out.empty()) {
      if (const int rc = write_text(options.out + ".txt", table, out, err); rc != kOk) return rc;
      if (const int rc = write_text(options.out + ".csv", format_csv(report), out, err);
          rc != kOk) {
        return rc;
      }
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e) == kBadData ? kBadConfig : exit_code_for(e);
  }
}

}  // namespace cptkit::cli
