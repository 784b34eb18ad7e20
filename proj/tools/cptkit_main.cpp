#include <iostream>

#include <CLI11.hpp>

#include "cli_commands.hpp"

namespace {

void add_detector_flags(CLI::App& cmd, cptkit::cli::DetectorFlags& flags, bool with_seed) {
  if (with_seed) cmd.add_option("--seed", flags.seed, "Random seed for interval draws");
  cmd.add_option("--intervals", flags.intervals, "WBS: number of random intervals M");
  cmd.add_option("--threshold-c", flags.threshold_c,
                 "WBS/binseg: threshold constant C in C*sqrt(2 ln T)*sigma");
  cmd.add_option("--m-stage", flags.m_stage, "WBS2: intervals drawn per segment");
  cmd.add_option("--lambda", flags.lambda, "SDLL: gate constant");
  cmd.add_option("--low-level", flags.low_level, "SDLL: low level as a fraction of the gate");
  cmd.add_option("--threshold", flags.threshold, "binseg: absolute threshold (overrides C)");
  cmd.add_option("--min-len", flags.min_len, "binseg: minimum segment length to split");
  cmd.add_option("--min-seg", flags.min_seg, "BIC/mBIC: minimum segment length");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace cptkit::cli;

  CLI::App app{"cptkit: changepoint detection, configuration distance and null studies"};
  app.require_subcommand(1);

  DetectOptions detect;
  auto* detect_cmd = app.add_subcommand("detect", "Detect changepoints in a series file");
  detect_cmd->add_option("input", detect.input, "Series file (one value per line or time,value)")
      ->required();
  detect_cmd->add_option("--method", detect.method, "binseg | wbs | wbs2-sdll | bic | mbic");
  detect_cmd->add_option("--out", detect.output, "Result file (default: stdout)");
  add_detector_flags(*detect_cmd, detect.detector, true);

  DistanceOptions distance;
  auto* distance_cmd =
      app.add_subcommand("distance", "Distance between two changepoint lists");
  distance_cmd->add_option("truth", distance.truth, "Reference changepoints")->required();
  distance_cmd->add_option("estimate", distance.estimate, "Estimated changepoints")->required();
  distance_cmd->add_option("-T,--length", distance.length, "Series length T")->required();

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Monte-Carlo null or teeth-signal study");
  // config files are read by the top-level app; keys live under [bench]
  app.set_config("--config", "", "TOML/INI file with a [bench] section");
  app.allow_config_extras(CLI::config_extras_mode::error);
  bench_cmd->fallthrough();
  bench_cmd->add_flag("--table1", bench.table1,
                      "Null study: bic, mbic, wbs, wbs2-sdll at T=100,500 with 1000 reps");
  auto* methods_opt = bench_cmd->add_option("--method,--methods", bench.methods,
                                            "Methods to run")->delimiter(',');
  auto* lengths_opt =
      bench_cmd->add_option("--lengths", bench.lengths, "Series lengths")->delimiter(',');
  auto* reps_opt = bench_cmd->add_option("--reps", bench.reps, "Replications per cell");
  bench_cmd->add_option("--seed,--master-seed", bench.seed, "Master seed");
  bench_cmd->add_option("--out", bench.out, "Output prefix: writes <out>.txt and <out>.csv");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0: all cores)");
  bench_cmd->add_flag("--teeth", bench.teeth, "Run the teeth-signal study instead");
  bench_cmd->add_option("--teeth-length", bench.teeth_spec.length, "Teeth: series length");
  bench_cmd->add_option("--period", bench.teeth_spec.period, "Teeth: period");
  bench_cmd->add_option("--amplitude", bench.teeth_spec.amplitude, "Teeth: amplitude");
  bench_cmd->add_option("--sigma", bench.teeth_spec.sigma, "Teeth: noise standard deviation");
  add_detector_flags(*bench_cmd, bench.detector, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadConfig;
  }

  if (detect_cmd->parsed()) return cmd_detect(detect, std::cout, std::cerr);
  if (distance_cmd->parsed()) return cmd_distance(distance, std::cout, std::cerr);

  if (bench.table1) {
    // standard null-study grid unless overridden explicitly
    if (methods_opt->count() == 0) bench.methods = {"bic", "mbic", "wbs", "wbs2-sdll"};
    if (lengths_opt->count() == 0) bench.lengths = {100, 500};
    if (reps_opt->count() == 0) bench.reps = 1000;
  }
  return cmd_bench(bench, std::cout, std::cerr);
}
