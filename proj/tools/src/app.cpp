#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "mrad/cli/commands.hpp"

namespace mrad::cli {
namespace {

// Flag values as typed; folded into a DetectorConfig after parsing.
struct DetectorFlags {
  std::string algorithm = "mrad";
  std::string grid = "4x4";
  double min_score = ScoringConfig{}.min_score;
  double saturation_fraction = DenoiseConfig{}.saturation_fraction;
  double kernel_fraction = DenoiseConfig{}.kernel_fraction;
  double stddev_range = DenoiseConfig{}.stddev_range_fraction;
  double blur_sigma = DenoiseConfig{}.blur_sigma;
  int blur_radius = DenoiseConfig{}.blur_radius;
  int footprint = GrowConfig{}.footprint_radius;
  double tolerance = GrowConfig{}.tolerance;
  std::optional<double> bandwidth;
  std::optional<std::size_t> area_threshold;
  unsigned workers = 0;
  std::string config_file;

  DetectorConfig to_config() const {
    DetectorConfig c;
    c.algorithm = parse_algorithm(algorithm);
    c.scoring.grid = parse_grid(grid);
    c.scoring.min_score = min_score;
    c.denoise.saturation_fraction = saturation_fraction;
    c.denoise.kernel_fraction = kernel_fraction;
    c.denoise.stddev_range_fraction = stddev_range;
    c.denoise.blur_sigma = blur_sigma;
    c.denoise.blur_radius = blur_radius;
    c.grow.footprint_radius = footprint;
    c.grow.tolerance = tolerance;
    c.grow.bandwidth = bandwidth;
    c.area_threshold = area_threshold;
    c.validate();
    return c;
  }
};

void add_detector_flags(CLI::App& app, DetectorFlags& f) {
  app.add_option("--config", f.config_file,
                 "key=value file of option defaults; flags given on the command line win");
  app.add_option("--algorithm", f.algorithm, "rxd, pad or mrad")->capture_default_str();
  app.add_option("--grid", f.grid, "statistics grid, ROWSxCOLS")->capture_default_str();
  app.add_option("--min-score", f.min_score,
                 "minimum raw score kept before scaling to [0,255]")->capture_default_str();
  app.add_option("--saturation-fraction", f.saturation_fraction,
                 "share of a cell above the minimum that saturates it")->capture_default_str();
  app.add_option("--kernel-fraction", f.kernel_fraction,
                 "std-dev window side as a fraction of the cell side")->capture_default_str();
  app.add_option("--stddev-range", f.stddev_range,
                 "cells whose local std-dev range is below this fraction of 255 are cleared")
      ->capture_default_str();
  app.add_option("--blur-sigma", f.blur_sigma, "Gaussian blur sigma in pixels")->capture_default_str();
  app.add_option("--blur-radius", f.blur_radius, "Gaussian blur radius in pixels")->capture_default_str();
  app.add_option("--footprint", f.footprint, "region-growing footprint radius")->capture_default_str();
  app.add_option("--tolerance", f.tolerance, "region-growing score tolerance")->capture_default_str();
  app.add_option("--bandwidth", f.bandwidth, "mean-shift bandwidth in pixels [default: 2% of the diagonal]");
  app.add_option("--area-threshold", f.area_threshold,
                 "anomalous iff more pixels than this [default: 0.1% of the image]");
  app.add_option("--workers", f.workers, "worker threads [default: $MRAD_WORKERS or CPU count]");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Lines are `key = value`; blank lines and `#` comments are ignored. Keys are
// long flag names without the dashes, with `_` accepted for `-`. A key only
// takes effect when its flag was not given on the command line.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(number);
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config" || key == "out" || key.empty()) {
      throw std::invalid_argument(where + ": '" + key + "' cannot be set from a config file");
    }
    CLI::Option* opt = nullptr;
    try {
      opt = app.get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw std::invalid_argument(where + ": unknown option '" + key + "'");
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw std::invalid_argument(where + ": bad value for '" + key + "': " + e.what());
    }
  }
}

DetectorConfig resolve(CLI::App& app, const DetectorFlags& flags) {
  if (!flags.config_file.empty()) apply_config_file(app, flags.config_file);
  return flags.to_config();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reference-conditioned visual anomaly detection", "mrad"};
  app.require_subcommand(1);

  DetectorFlags detect_flags;
  DetectRequest detect_request;
  CLI::App* detect = app.add_subcommand("detect", "write masks, score maps and results.csv");
  add_detector_flags(*detect, detect_flags);
  detect->add_option("dataset", detect_request.dataset, "dataset root")->required();
  detect->add_option("-o,--out", detect_request.out_dir, "output directory")->required();

  DetectorFlags eval_flags;
  EvaluateRequest eval_request;
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a labelled dataset");
  add_detector_flags(*evaluate, eval_flags);
  evaluate->add_option("dataset", eval_request.dataset, "dataset root")->required();
  evaluate->add_option("-o,--out", eval_request.report,
                       "JSON report path; the CSV report is written beside it")
      ->required();

  FixturesRequest fixtures_request;
  CLI::App* fixtures = app.add_subcommand("fixtures", "export a synthetic dataset");
  fixtures->add_option("--count", fixtures_request.count, "number of scenes")->capture_default_str();
  fixtures->add_option("--anomalous-fraction", fixtures_request.anomalous_fraction,
                       "share of scenes with a planted anomaly")
      ->capture_default_str();
  fixtures->add_option("--seed", fixtures_request.seed, "base seed")->capture_default_str();
  fixtures->add_option("-o,--out", fixtures_request.out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*detect) {
      detect_request.config = resolve(*detect, detect_flags);
      detect_request.workers = detect_flags.workers;
      return cmd_detect(detect_request, out, err);
    }
    if (*evaluate) {
      eval_request.config = resolve(*evaluate, eval_flags);
      eval_request.workers = eval_flags.workers;
      return cmd_evaluate(eval_request, out, err);
    }
    return cmd_fixtures(fixtures_request, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mrad::cli
