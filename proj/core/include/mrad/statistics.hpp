#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "mrad/imaging.hpp"

namespace mrad {

/// Score raster; values live in [0, 255] once produced by score_map.
using ScoreMap = Raster<double>;

/// Mean and regularised covariance of a set of colours. `precision` caches
/// the inverse covariance so that scoring costs one quadratic form per pixel.
struct ColorStats {
  Color mean = Color::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d precision = Eigen::Matrix3d::Identity();
  std::size_t sample_count = 0;
};

struct ScoringConfig {
  GridSpec grid{4, 4};
  double min_score = 20.0;               // compared with the raw score, before scaling
  double regularization_epsilon = 1e-6;  // relative to trace(cov) / 3

  void validate() const;
};

inline constexpr double kScoreScale = 255.0;

/// Unbiased (n - 1) sample covariance with ridge regularisation:
///  - trace <= 1e-12 (constant colour): cov + epsilon * I
///  - lambda_min <= epsilon * trace / 3: cov + epsilon * trace / 3 * I
/// Throws std::invalid_argument for fewer than two samples.
ColorStats compute_stats(std::span<const Color> pixels, double epsilon);

/// Builds stats from an explicit mean/covariance (no regularisation).
ColorStats make_stats(const Color& mean, const Eigen::Matrix3d& covariance,
                      std::size_t sample_count = 2);

/// Squared Mahalanobis distance (x - mu)^T Sigma^-1 (x - mu).
double rxd_score(const Color& pixel, const ColorStats& stats) noexcept;

/// max(0, RXD_ref(x) - RXD_query(x)).
double mrad_score(const Color& pixel, const ColorStats& ref_stats,
                  const ColorStats& query_stats) noexcept;

/// Stats of the pixels of `image` inside `cell`.
ColorStats cell_stats(const ImageRGB& image, const CellBounds& cell, double epsilon);

/// Zeroes raw scores not above `min_score`, then rescales the survivors in
/// place so the maximum becomes 255. All zeros if nothing survives.
void threshold_and_scale(ScoreMap& raw, double min_score);

/// Grid-local reference-conditioned score map. Each cell of the query is
/// scored against the stats of the same cell in the reference and in the
/// query; the result is thresholded and scaled by threshold_and_scale.
/// Throws std::invalid_argument when the two images differ in size.
ScoreMap score_map(const ImageRGB& query, const ImageRGB& reference, const ScoringConfig& config);

/// Raw (unscaled, clamped) per-pixel scores behind score_map.
ScoreMap raw_score_map(const ImageRGB& query, const ImageRGB& reference,
                       const ScoringConfig& config);

}  // namespace mrad
