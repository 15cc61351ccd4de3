#include "mrad/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mrad/cli/dataset.hpp"
#include "mrad/cli/workers.hpp"
#include "mrad/error.hpp"
#include "mrad/evaluation.hpp"
#include "mrad/fixtures.hpp"
#include "mrad/report.hpp"

namespace mrad::cli {
namespace fs = std::filesystem;
namespace {

constexpr int kExitImageFailure = 1;
constexpr int kExitUsage = 2;

Raster<std::uint8_t> to_gray(const PixelEvalMap& eval) {
  Raster<std::uint8_t> gray(eval.width(), eval.height(), 0);
  for (std::size_t i = 0; i < eval.size(); ++i) {
    gray[i] = static_cast<std::uint8_t>(std::lround(std::clamp(eval[i], 0.0, 255.0)));
  }
  return gray;
}

Detection run_detector(const DatasetLayout& layout, const std::string& name,
                       const DetectorConfig& config, int* width = nullptr, int* height = nullptr) {
  const ImageRGB query = load_image(layout.query(name));
  if (width) *width = query.width();
  if (height) *height = query.height();
  if (config.algorithm == Algorithm::RXD) return detect(query, nullptr, config);
  const ImageRGB reference = load_image(layout.reference(name));
  return detect(query, &reference, config);
}

std::string format_metric(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

struct DetectOutcome {
  std::string error;
  std::size_t pixel_count = 0;
  Verdict verdict = Verdict::Normal;
};

struct EvalOutcome {
  std::string error;
  DetectionResult result;
  PixelEvalMap eval;
  LabelMask truth;
};

}  // namespace

int cmd_detect(const DetectRequest& request, std::ostream& out, std::ostream& err) {
  DatasetLayout layout;
  try {
    request.config.validate();
    layout = DatasetLayout::open(request.dataset,
                                 {.reference = request.config.algorithm != Algorithm::RXD});
    fs::create_directories(request.out_dir / "masks");
    fs::create_directories(request.out_dir / "scores");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const auto& names = layout.names();
  std::vector<std::string> rows;
  std::size_t failures = 0;
  ordered_parallel<DetectOutcome>(
      names.size(), resolve_workers(request.workers),
      [&](std::size_t i) {
        DetectOutcome outcome;
        try {
          const Detection d = run_detector(layout, names[i], request.config);
          save_mask(d.result.anomaly_map, request.out_dir / "masks" / names[i]);
          save_gray8(to_gray(d.eval), request.out_dir / "scores" / names[i]);
          outcome.pixel_count = d.result.pixel_count;
          outcome.verdict = d.result.verdict;
        } catch (const std::exception& e) {
          outcome.error = e.what();
        }
        return outcome;
      },
      [&](std::size_t i, DetectOutcome outcome) {
        if (!outcome.error.empty()) {
          err << "error: " << names[i] << ": " << outcome.error << '\n';
          ++failures;
          return;
        }
        rows.push_back(names[i] + ',' + std::to_string(outcome.pixel_count) + ',' +
                       to_string(outcome.verdict));
      });

  std::ofstream csv(request.out_dir / "results.csv", std::ios::binary | std::ios::trunc);
  csv << "filename,pixel_count,verdict\n";
  for (const std::string& row : rows) csv << row << '\n';
  if (!csv) {
    err << "error: cannot write " << (request.out_dir / "results.csv").string() << '\n';
    return kExitImageFailure;
  }
  out << "processed " << rows.size() << " of " << names.size() << " images\n";
  return failures == 0 ? 0 : kExitImageFailure;
}

int cmd_evaluate(const EvaluateRequest& request, std::ostream& out, std::ostream& err) {
  DatasetLayout layout;
  try {
    request.config.validate();
    layout = DatasetLayout::open(request.dataset,
                                 {.reference = request.config.algorithm != Algorithm::RXD,
                                  .labels = true,
                                  .masks = true});
    if (request.report.has_parent_path()) fs::create_directories(request.report.parent_path());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const auto& names = layout.names();
  RunEvaluator evaluator;
  std::vector<std::string> failed;
  ordered_parallel<EvalOutcome>(
      names.size(), resolve_workers(request.workers),
      [&](std::size_t i) {
        EvalOutcome outcome;
        try {
          int w = 0, h = 0;
          Detection d = run_detector(layout, names[i], request.config, &w, &h);
          outcome.truth = layout.truth(names[i], w, h);
          outcome.result = std::move(d.result);
          outcome.eval = std::move(d.eval);
        } catch (const std::exception& e) {
          outcome.error = e.what();
        }
        return outcome;
      },
      [&](std::size_t i, EvalOutcome outcome) {
        if (!outcome.error.empty()) {
          err << "error: " << names[i] << ": " << outcome.error << '\n';
          failed.push_back(names[i]);
          return;
        }
        evaluator.add(names[i], outcome.result, outcome.eval, outcome.truth,
                      layout.is_anomalous(names[i]));
      });

  MetricsReport report = evaluator.finish(config_to_json(request.config));
  for (const std::string& name : failed) report.warnings.push_back("skipped '" + name + "' after an error");
  fs::path csv_path = request.report;
  csv_path.replace_extension(".csv");
  try {
    write_report_json(report, request.report);
    write_report_csv(report, csv_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitImageFailure;
  }
  for (const std::string& w : report.warnings) err << "warning: " << w << '\n';
  out << "I.AUROC\tP.AUROC\tP.AP\n"
      << format_metric(report.i_auroc) << '\t' << format_metric(report.p_auroc) << '\t'
      << format_metric(report.p_ap) << '\n';
  return failed.empty() ? 0 : kExitImageFailure;
}

int cmd_fixtures(const FixturesRequest& request, std::ostream& out, std::ostream& err) {
  std::vector<SceneParams> plan;
  try {
    plan = plan_suite(request.count, request.anomalous_fraction, request.seed);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    export_suite(plan, request.out_dir);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitImageFailure;
  }
  out << "wrote " << plan.size() << " scenes to " << request.out_dir.string() << '\n';
  return 0;
}

}  // namespace mrad::cli
