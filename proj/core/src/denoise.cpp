#include "mrad/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mrad {

namespace {

// Variances at or below this (on the 255 scale) are indistinguishable from
// round-off in the summed-area tables.
constexpr double kFlatVariance = 1e-10 * kScoreScale * kScoreScale;

}  // namespace

void DenoiseConfig::validate() const {
  if (!(saturation_fraction > 0.0 && saturation_fraction <= 1.0)) {
    throw std::invalid_argument("saturation_fraction must lie in (0, 1]");
  }
  if (!(kernel_fraction > 0.0 && kernel_fraction < 1.0)) {
    throw std::invalid_argument("kernel_fraction must lie in (0, 1)");
  }
  if (!(stddev_range_fraction > 0.0 && stddev_range_fraction < 1.0)) {
    throw std::invalid_argument("stddev_range_fraction must lie in (0, 1)");
  }
  if (!(blur_sigma > 0.0)) throw std::invalid_argument("blur_sigma must be positive");
  if (blur_radius < 1) throw std::invalid_argument("blur_radius must be at least 1");
}

ScoreMap saturate_cells(const ScoreMap& map, GridSpec grid, double min_score, double fraction) {
  ScoreMap out = map;
  for (const CellBounds& cell : partition(map.width(), map.height(), grid)) {
    std::size_t above = 0;
    for (int y = cell.y0; y < cell.y1; ++y) {
      for (int x = cell.x0; x < cell.x1; ++x) above += map(x, y) > min_score ? 1 : 0;
    }
    if (static_cast<double>(above) > fraction * static_cast<double>(cell.area())) {
      for (int y = cell.y0; y < cell.y1; ++y) {
        for (int x = cell.x0; x < cell.x1; ++x) out(x, y) = kScoreScale;
      }
    }
  }
  return out;
}

int stddev_kernel_side(const CellBounds& cell, double kernel_fraction) {
  int side = static_cast<int>(
      std::lround(kernel_fraction * static_cast<double>(std::min(cell.width(), cell.height()))));
  side = std::max(3, side);
  if (side % 2 == 0) ++side;
  return side;
}

std::vector<double> local_stddev(const ScoreMap& map, const CellBounds& cell, int kernel_side) {
  const int r = kernel_side / 2;
  const int w = cell.width();
  const int h = cell.height();
  // Summed-area tables over the edge-clamped, r-padded cell.
  const int pw = w + 2 * r;
  const int ph = h + 2 * r;
  std::vector<double> s1(static_cast<std::size_t>(pw + 1) * (ph + 1), 0.0);
  std::vector<double> s2(s1.size(), 0.0);
  auto at = [pw](int x, int y) { return static_cast<std::size_t>(y) * (pw + 1) + x; };
  for (int py = 0; py < ph; ++py) {
    const int y = cell.y0 + std::clamp(py - r, 0, h - 1);
    double row1 = 0.0;
    double row2 = 0.0;
    for (int px = 0; px < pw; ++px) {
      const int x = cell.x0 + std::clamp(px - r, 0, w - 1);
      const double v = map(x, y);
      row1 += v;
      row2 += v * v;
      s1[at(px + 1, py + 1)] = s1[at(px + 1, py)] + row1;
      s2[at(px + 1, py + 1)] = s2[at(px + 1, py)] + row2;
    }
  }
  const double n = static_cast<double>(kernel_side) * kernel_side;
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // window in padded coordinates: [x, x + k) x [y, y + k)
      const int xa = x, xb = x + kernel_side, ya = y, yb = y + kernel_side;
      const double sum = s1[at(xb, yb)] - s1[at(xa, yb)] - s1[at(xb, ya)] + s1[at(xa, ya)];
      const double sq = s2[at(xb, yb)] - s2[at(xa, yb)] - s2[at(xb, ya)] + s2[at(xa, ya)];
      const double mean = sum / n;
      double var = sq / n - mean * mean;
      // summed-area round-off; a flat window must read exactly zero
      if (var <= kFlatVariance) var = 0.0;
      out[static_cast<std::size_t>(y) * w + x] = std::sqrt(var);
    }
  }
  return out;
}

ScoreMap local_stddev_suppress(const ScoreMap& map, GridSpec grid, const DenoiseConfig& config) {
  ScoreMap out = map;
  const double threshold = config.stddev_range_fraction * kScoreScale;
  for (const CellBounds& cell : partition(map.width(), map.height(), grid)) {
    const auto sd = local_stddev(map, cell, stddev_kernel_side(cell, config.kernel_fraction));
    const auto [lo, hi] = std::minmax_element(sd.begin(), sd.end());
    if (*hi - *lo < threshold) {
      for (int y = cell.y0; y < cell.y1; ++y) {
        for (int x = cell.x0; x < cell.x1; ++x) out(x, y) = 0.0;
      }
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0) || radius < 1) {
    throw std::invalid_argument("gaussian_kernel: need sigma > 0 and radius >= 1");
  }
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    taps[static_cast<std::size_t>(i + radius)] = w;
    total += w;
  }
  for (double& w : taps) w /= total;
  return taps;
}

int reflect_index(int i, int n) noexcept {
  if (n <= 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

ScoreMap gaussian_blur(const ScoreMap& map, double sigma, int radius) {
  const std::vector<double> taps = gaussian_kernel(sigma, radius);
  const int w = map.width();
  const int h = map.height();
  const int n = 2 * radius + 1;
  ScoreMap tmp(w, h, 0.0);
  std::vector<double> padded(static_cast<std::size_t>(w + 2 * radius));
  for (int y = 0; y < h; ++y) {
    const auto src = map.row(y);
    for (int i = 0; i < w + 2 * radius; ++i) padded[i] = src[reflect_index(i - radius, w)];
    auto dst = tmp.row(y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += taps[k] * padded[x + k];
      dst[x] = acc;
    }
  }
  // Vertical pass a row at a time; same tap order per pixel as the horizontal one.
  ScoreMap out(w, h, 0.0);
  std::vector<double> acc(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int k = 0; k < n; ++k) {
      const auto src = tmp.row(reflect_index(y + k - radius, h));
      const double t = taps[k];
      for (int x = 0; x < w; ++x) acc[x] += t * src[x];
    }
    auto dst = out.row(y);
    for (int x = 0; x < w; ++x) dst[x] = std::clamp(acc[x], 0.0, kScoreScale);
  }
  return out;
}

ScoreMap denoise(const ScoreMap& map, GridSpec grid, double min_score, const DenoiseConfig& config) {
  config.validate();
  ScoreMap out = saturate_cells(map, grid, min_score, config.saturation_fraction);
  out = local_stddev_suppress(out, grid, config);
  return gaussian_blur(out, config.blur_sigma, config.blur_radius);
}

}  // namespace mrad
