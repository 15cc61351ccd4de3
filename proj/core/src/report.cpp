#include "mrad/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "mrad/error.hpp"

namespace mrad {
namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

nlohmann::json config_to_json(const DetectorConfig& config) {
  nlohmann::json j;
  j["algorithm"] = to_string(config.algorithm);
  j["grid"] = to_string(config.scoring.grid);
  j["min_score"] = config.scoring.min_score;
  j["regularization_epsilon"] = config.scoring.regularization_epsilon;
  j["saturation_fraction"] = config.denoise.saturation_fraction;
  j["kernel_fraction"] = config.denoise.kernel_fraction;
  j["stddev_range"] = config.denoise.stddev_range_fraction;
  j["blur_sigma"] = config.denoise.blur_sigma;
  j["blur_radius"] = config.denoise.blur_radius;
  j["footprint"] = config.grow.footprint_radius;
  j["tolerance"] = config.grow.tolerance;
  j["bandwidth"] = config.grow.bandwidth ? nlohmann::json(*config.grow.bandwidth)
                                         : nlohmann::json("auto");
  j["max_shift_iters"] = config.grow.max_shift_iters;
  j["shift_convergence"] = config.grow.shift_convergence;
  j["area_threshold"] = config.area_threshold ? nlohmann::json(*config.area_threshold)
                                              : nlohmann::json("auto");
  return j;
}

nlohmann::json report_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["metrics"] = {{"i_auroc", optional_number(report.i_auroc)},
                  {"p_auroc", optional_number(report.p_auroc)},
                  {"p_ap", optional_number(report.p_ap)}};
  j["config"] = report.config;
  j["warnings"] = report.warnings;
  nlohmann::json images = nlohmann::json::array();
  for (const ImageRecord& r : report.per_image) {
    images.push_back({{"id", r.id},
                      {"image_score", r.image_score},
                      {"verdict", to_string(r.verdict)},
                      {"label", r.is_anomalous ? "anomalous" : "normal"},
                      {"pixel_ap", optional_number(r.pixel_ap)}});
  }
  j["images"] = std::move(images);
  return j;
}

std::string report_to_csv(const MetricsReport& report) {
  std::ostringstream os;
  os << "id,image_score,verdict,label,pixel_ap\n";
  for (const ImageRecord& r : report.per_image) {
    os << r.id << ',' << format_number(r.image_score) << ',' << to_string(r.verdict) << ','
       << (r.is_anomalous ? "anomalous" : "normal") << ','
       << (r.pixel_ap ? format_number(*r.pixel_ap) : std::string()) << '\n';
  }
  return os.str();
}

void write_report_json(const MetricsReport& report, const std::filesystem::path& path) {
  write_text(path, report_to_json(report).dump(2) + "\n");
}

void write_report_csv(const MetricsReport& report, const std::filesystem::path& path) {
  write_text(path, report_to_csv(report));
}

}  // namespace mrad
