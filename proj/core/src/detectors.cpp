#include "mrad/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace mrad {
namespace {

void require_same_shape(const ImageRGB& query, const ImageRGB& reference) {
  if (!query.same_shape(reference)) {
    throw std::invalid_argument("query is " + std::to_string(query.width()) + "x" +
                                std::to_string(query.height()) + " but reference is " +
                                std::to_string(reference.width()) + "x" +
                                std::to_string(reference.height()));
  }
}

ColorStats whole_image_stats(const ImageRGB& image, double epsilon) {
  return compute_stats(image.values(), epsilon);
}

// Shared tail of the ungridded baselines: scale, threshold into a mask, classify.
Detection finish_baseline(ScoreMap raw, const DetectorConfig& config) {
  threshold_and_scale(raw, config.scoring.min_score);
  BinaryMask mask(raw.width(), raw.height(), 0);
  for (std::size_t i = 0; i < raw.size(); ++i) mask[i] = raw[i] > 0.0 ? 1 : 0;
  Detection out;
  out.result = classify(std::move(mask), config.resolved_area_threshold(raw.width(), raw.height()));
  out.eval = std::move(raw);
  return out;
}

}  // namespace

const char* to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::RXD: return "rxd";
    case Algorithm::PAD: return "pad";
    case Algorithm::MRAD: return "mrad";
  }
  return "mrad";
}

Algorithm parse_algorithm(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "rxd") return Algorithm::RXD;
  if (lower == "pad") return Algorithm::PAD;
  if (lower == "mrad") return Algorithm::MRAD;
  throw std::invalid_argument("unknown algorithm '" + text + "' (expected rxd, pad or mrad)");
}

void DetectorConfig::validate() const {
  scoring.validate();
  denoise.validate();
  grow.validate();
}

std::size_t DetectorConfig::resolved_area_threshold(int width, int height) const {
  if (area_threshold) return *area_threshold;
  return static_cast<std::size_t>(
      std::floor(kDefaultAreaFraction * static_cast<double>(width) * static_cast<double>(height)));
}

MradTrace trace_mrad(const ImageRGB& query, const ImageRGB& reference, const DetectorConfig& config) {
  config.validate();
  require_same_shape(query, reference);
  MradTrace trace;
  trace.scores = score_map(query, reference, config.scoring);
  trace.denoised = denoise(trace.scores, config.scoring.grid, 0.0, config.denoise);
  trace.seeds = mean_shift_seeds(trace.denoised, config.grow);
  // A seed whose tolerance band reaches zero would flood the background.
  std::erase_if(trace.seeds, [&](const Seed& s) { return s.score <= config.grow.tolerance; });
  BinaryMask mask = region_grow(trace.denoised, trace.seeds, config.grow);

  PixelEvalMap eval(query.width(), query.height(), 0.0);
  for (std::size_t i = 0; i < mask.size(); ++i) eval[i] = mask[i] ? trace.denoised[i] : 0.0;
  trace.detection.result =
      classify(std::move(mask), config.resolved_area_threshold(query.width(), query.height()));
  trace.detection.eval = std::move(eval);
  return trace;
}

Detection detect_mrad(const ImageRGB& query, const ImageRGB& reference, const DetectorConfig& config) {
  return trace_mrad(query, reference, config).detection;
}

Detection detect_pad(const ImageRGB& query, const ImageRGB& reference, const DetectorConfig& config) {
  config.validate();
  require_same_shape(query, reference);
  const double eps = config.scoring.regularization_epsilon;
  const ColorStats ref = whole_image_stats(reference, eps);
  const ColorStats qry = whole_image_stats(query, eps);
  ScoreMap raw(query.width(), query.height(), 0.0);
  for (std::size_t i = 0; i < query.size(); ++i) raw[i] = mrad_score(query[i], ref, qry);
  return finish_baseline(std::move(raw), config);
}

Detection detect_rxd(const ImageRGB& query, const DetectorConfig& config) {
  config.validate();
  const ColorStats stats = whole_image_stats(query, config.scoring.regularization_epsilon);
  ScoreMap raw(query.width(), query.height(), 0.0);
  for (std::size_t i = 0; i < query.size(); ++i) raw[i] = rxd_score(query[i], stats);
  return finish_baseline(std::move(raw), config);
}

Detection detect(const ImageRGB& query, const ImageRGB* reference, const DetectorConfig& config) {
  if (config.algorithm == Algorithm::RXD) return detect_rxd(query, config);
  if (reference == nullptr) {
    throw std::invalid_argument(std::string(to_string(config.algorithm)) +
                                " requires a reference image");
  }
  return config.algorithm == Algorithm::PAD ? detect_pad(query, *reference, config)
                                            : detect_mrad(query, *reference, config);
}

}  // namespace mrad
