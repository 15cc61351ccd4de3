#pragma once

#include <vector>

#include "mrad/imaging.hpp"
#include "mrad/statistics.hpp"

namespace mrad {

struct DenoiseConfig {
  double saturation_fraction = 0.9;     // (0, 1]
  double kernel_fraction = 0.10;        // of min(cell width, cell height)
  double stddev_range_fraction = 0.03;  // of the 255 score scale
  double blur_sigma = 2.0;
  int blur_radius = 5;

  void validate() const;
};

/// Marks a cell fully anomalous (255) when strictly more than
/// `fraction` x area of its pixels exceed `min_score`.
ScoreMap saturate_cells(const ScoreMap& map, GridSpec grid, double min_score, double fraction);

/// Odd sliding-window side used for a cell of the given size (minimum 3).
int stddev_kernel_side(const CellBounds& cell, double kernel_fraction);

/// Local standard deviation over a k x k window restricted to `cell`, with
/// coordinates clamped to the cell edges. Row-major, cell-sized.
std::vector<double> local_stddev(const ScoreMap& map, const CellBounds& cell, int kernel_side);

/// Zeroes every cell whose local-stddev map has a range (max - min) below
/// stddev_range_fraction x 255; other cells are left untouched.
ScoreMap local_stddev_suppress(const ScoreMap& map, GridSpec grid, const DenoiseConfig& config);

/// Normalised, truncated Gaussian taps of length 2 * radius + 1.
std::vector<double> gaussian_kernel(double sigma, int radius);

/// Reflect-101 index mapping (d c b | a b c d | c b a) for any offset.
int reflect_index(int i, int n) noexcept;

/// Separable Gaussian convolution with reflect-101 borders; output clamped to [0, 255].
ScoreMap gaussian_blur(const ScoreMap& map, double sigma, int radius);

/// saturate -> suppress -> blur.
ScoreMap denoise(const ScoreMap& map, GridSpec grid, double min_score, const DenoiseConfig& config);

}  // namespace mrad
