#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mrad/clustering.hpp"
#include "mrad/denoise.hpp"
#include "mrad/imaging.hpp"
#include "mrad/statistics.hpp"

namespace mrad {

enum class Algorithm { RXD, PAD, MRAD };

const char* to_string(Algorithm algorithm) noexcept;
Algorithm parse_algorithm(const std::string& text);  // case-insensitive

/// Continuous per-pixel scores used for pixel-level AUROC / AP.
using PixelEvalMap = Raster<double>;

struct DetectorConfig {
  ScoringConfig scoring;
  DenoiseConfig denoise;
  GrowConfig grow;
  /// Unset -> 0.1% of the image's pixel count, rounded down.
  std::optional<std::size_t> area_threshold;
  Algorithm algorithm = Algorithm::MRAD;

  static constexpr double kDefaultAreaFraction = 0.001;

  void validate() const;
  std::size_t resolved_area_threshold(int width, int height) const;
};

struct Detection {
  DetectionResult result;
  PixelEvalMap eval;
};

/// Every intermediate raster of one MRAD run.
struct MradTrace {
  ScoreMap scores;    // scaled + thresholded grid-local scores
  ScoreMap denoised;  // after saturate -> suppress -> blur
  std::vector<Seed> seeds;
  Detection detection;
};

MradTrace trace_mrad(const ImageRGB& query, const ImageRGB& reference, const DetectorConfig& config);

Detection detect_mrad(const ImageRGB& query, const ImageRGB& reference, const DetectorConfig& config);

/// Whole-image reference/query score difference, scaled, thresholded into a mask.
Detection detect_pad(const ImageRGB& query, const ImageRGB& reference, const DetectorConfig& config);

/// Whole-image RX detector on the query alone.
Detection detect_rxd(const ImageRGB& query, const DetectorConfig& config);

/// Dispatches on config.algorithm. `reference` may be null only for RXD.
Detection detect(const ImageRGB& query, const ImageRGB* reference, const DetectorConfig& config);

}  // namespace mrad
