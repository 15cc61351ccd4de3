#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mrad/imaging.hpp"
#include "mrad/statistics.hpp"

namespace mrad {

struct Seed {
  int x = 0;
  int y = 0;
  double score = 0.0;

  friend bool operator==(const Seed&, const Seed&) = default;
};

struct GrowConfig {
  int footprint_radius = 1;  // 1 -> 3x3 square neighbourhood
  double tolerance = 25.0;   // allowed |score - seed score|
  /// Mean-shift bandwidth in pixels; unset -> 2% of the image diagonal.
  std::optional<double> bandwidth;
  int max_shift_iters = 100;
  double shift_convergence = 0.5;

  static constexpr double kSmallTolerance = 10.0;
  static constexpr double kLargeTolerance = 60.0;
  static constexpr double kDefaultBandwidthFraction = 0.02;

  void validate() const;
  double resolved_bandwidth(int width, int height) const;
};

enum class Verdict { Normal, Anomalous };

const char* to_string(Verdict verdict) noexcept;

struct DetectionResult {
  BinaryMask anomaly_map;
  std::size_t pixel_count = 0;
  double image_score = 0.0;  // == pixel_count
  Verdict verdict = Verdict::Normal;
};

/// A mean-shift sample: a pixel position carrying a positive weight.
struct WeightedPoint {
  int x = 0;
  int y = 0;
  double weight = 0.0;
};

/// Flat-kernel, weight-weighted mean shift over `points` on a width x height
/// lattice. Every point climbs to a mode; converged positions closer than
/// bandwidth / 2 (transitively) are merged and their mean is returned.
/// The result does not depend on the order of `points`.
std::vector<Eigen::Vector2d> mean_shift_modes(std::span<const WeightedPoint> points, int width,
                                              int height, double bandwidth, int max_iters,
                                              double convergence);

/// Runs mean shift over the pixels with score > 0 and turns each mode into a
/// seed at the rounded centroid. Modes landing on a zero-score pixel carry
/// no evidence and are dropped. Seeds come back sorted by (y, x).
std::vector<Seed> mean_shift_seeds(const ScoreMap& map, const GrowConfig& config);

/// Breadth-first growth from every seed: a pixel joins when it is inside the
/// footprint of an accepted pixel and |score - seed score| <= tolerance.
/// Throws std::invalid_argument for out-of-bounds seeds.
BinaryMask region_grow(const ScoreMap& map, std::span<const Seed> seeds, const GrowConfig& config);

/// Anomalous iff the set-bit count is strictly greater than area_threshold.
DetectionResult classify(BinaryMask mask, std::size_t area_threshold);

}  // namespace mrad
