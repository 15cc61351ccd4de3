#include "mrad/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace mrad {
namespace {

constexpr double kDegenerateTrace = 1e-12;

Eigen::Matrix3d invert_spd(const Eigen::Matrix3d& m) {
  return m.ldlt().solve(Eigen::Matrix3d::Identity());
}

}  // namespace

void ScoringConfig::validate() const {
  if (grid.rows < 1 || grid.cols < 1) throw std::invalid_argument("grid must be at least 1x1");
  if (!(min_score >= 0.0 && std::isfinite(min_score))) {
    throw std::invalid_argument("min_score must be finite and >= 0");
  }
  if (!(regularization_epsilon > 0.0)) {
    throw std::invalid_argument("regularization_epsilon must be positive");
  }
}

ColorStats compute_stats(std::span<const Color> pixels, double epsilon) {
  if (pixels.size() < 2) {
    throw std::invalid_argument("compute_stats: need at least 2 pixels, got " +
                                std::to_string(pixels.size()));
  }
  // Welford update; numerically close to a two-pass computation.
  Color mean = Color::Zero();
  Eigen::Matrix3d scatter = Eigen::Matrix3d::Zero();
  double n = 0.0;
  for (const Color& p : pixels) {
    n += 1.0;
    const Color delta = p - mean;
    mean += delta / n;
    scatter.noalias() += delta * (p - mean).transpose();
  }
  Eigen::Matrix3d cov = scatter / (n - 1.0);
  cov = 0.5 * (cov + cov.transpose());

  const double trace = cov.trace();
  if (trace <= kDegenerateTrace) {
    cov += epsilon * Eigen::Matrix3d::Identity();
  } else {
    const double floor = epsilon * trace / 3.0;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= floor) cov += floor * Eigen::Matrix3d::Identity();
  }

  ColorStats stats;
  stats.mean = mean;
  stats.covariance = cov;
  stats.precision = invert_spd(cov);
  stats.precision = 0.5 * (stats.precision + stats.precision.transpose());
  stats.sample_count = pixels.size();
  return stats;
}

ColorStats make_stats(const Color& mean, const Eigen::Matrix3d& covariance,
                      std::size_t sample_count) {
  ColorStats stats;
  stats.mean = mean;
  stats.covariance = covariance;
  stats.precision = invert_spd(covariance);
  stats.sample_count = sample_count;
  return stats;
}

double rxd_score(const Color& pixel, const ColorStats& stats) noexcept {
  const Color d = pixel - stats.mean;
  return std::max(0.0, d.dot(stats.precision * d));
}

double mrad_score(const Color& pixel, const ColorStats& ref_stats,
                  const ColorStats& query_stats) noexcept {
  return std::max(0.0, rxd_score(pixel, ref_stats) - rxd_score(pixel, query_stats));
}

ColorStats cell_stats(const ImageRGB& image, const CellBounds& cell, double epsilon) {
  std::vector<Color> pixels;
  pixels.reserve(cell.area());
  for (int y = cell.y0; y < cell.y1; ++y) {
    const auto row = image.row(y);
    pixels.insert(pixels.end(), row.begin() + cell.x0, row.begin() + cell.x1);
  }
  return compute_stats(pixels, epsilon);
}

void threshold_and_scale(ScoreMap& raw, double min_score) {
  double peak = 0.0;
  for (double& v : raw.values()) {
    if (!(v > min_score)) v = 0.0;
    peak = std::max(peak, v);
  }
  if (peak <= 0.0) return;
  const double factor = kScoreScale / peak;
  for (double& v : raw.values()) {
    // the peak maps to exactly 255
    v = (v == peak) ? kScoreScale : std::min(v * factor, kScoreScale);
  }
}

ScoreMap raw_score_map(const ImageRGB& query, const ImageRGB& reference,
                       const ScoringConfig& config) {
  config.validate();
  if (!query.same_shape(reference)) {
    throw std::invalid_argument("score_map: query is " + std::to_string(query.width()) + "x" +
                                std::to_string(query.height()) + " but reference is " +
                                std::to_string(reference.width()) + "x" +
                                std::to_string(reference.height()));
  }
  ScoreMap raw(query.width(), query.height(), 0.0);
  for (const CellBounds& cell : partition(query.width(), query.height(), config.grid)) {
    const ColorStats ref = cell_stats(reference, cell, config.regularization_epsilon);
    const ColorStats qry = cell_stats(query, cell, config.regularization_epsilon);
    for (int y = cell.y0; y < cell.y1; ++y) {
      for (int x = cell.x0; x < cell.x1; ++x) raw(x, y) = mrad_score(query(x, y), ref, qry);
    }
  }
  return raw;
}

ScoreMap score_map(const ImageRGB& query, const ImageRGB& reference, const ScoringConfig& config) {
  ScoreMap map = raw_score_map(query, reference, config);
  threshold_and_scale(map, config.min_score);
  return map;
}

}  // namespace mrad
