#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "mrad/detectors.hpp"

namespace mrad::cli {

struct DetectRequest {
  std::filesystem::path dataset;
  std::filesystem::path out_dir;
  DetectorConfig config;
  unsigned workers = 0;  // 0: MRAD_WORKERS or the CPU count
};

struct EvaluateRequest {
  std::filesystem::path dataset;
  std::filesystem::path report;  // JSON path; the CSV goes next to it
  DetectorConfig config;
  unsigned workers = 0;
};

struct FixturesRequest {
  int count = 100;
  double anomalous_fraction = 0.5;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};

/// Writes out_dir/masks/<name>, out_dir/scores/<name> and out_dir/results.csv
/// (filename,pixel_count,verdict sorted by filename). Returns 0 when every
/// image was processed, 1 when some failed, 2 on a layout error.
int cmd_detect(const DetectRequest& request, std::ostream& out, std::ostream& err);

/// Runs the detector over a labelled dataset, writes the JSON and CSV
/// reports and prints "I.AUROC P.AUROC P.AP". Same exit codes as cmd_detect.
int cmd_evaluate(const EvaluateRequest& request, std::ostream& out, std::ostream& err);

int cmd_fixtures(const FixturesRequest& request, std::ostream& out, std::ostream& err);

/// Full command line: `mrad <detect|evaluate|fixtures> [options]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mrad::cli
