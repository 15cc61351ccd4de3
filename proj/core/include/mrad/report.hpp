#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "mrad/detectors.hpp"
#include "mrad/evaluation.hpp"

namespace mrad {

/// Version of the JSON / CSV report layout documented in docs/report-schema.md.
inline constexpr int kReportSchemaVersion = 1;

nlohmann::json config_to_json(const DetectorConfig& config);

/// {"schema_version", "metrics": {i_auroc, p_auroc, p_ap}, "config",
///  "warnings", "images": [{id, image_score, verdict, label, pixel_ap}]}.
/// Undefined metrics serialise as null.
nlohmann::json report_to_json(const MetricsReport& report);

/// One row per image: id,image_score,verdict,label,pixel_ap
std::string report_to_csv(const MetricsReport& report);

void write_report_json(const MetricsReport& report, const std::filesystem::path& path);
void write_report_csv(const MetricsReport& report, const std::filesystem::path& path);

}  // namespace mrad
