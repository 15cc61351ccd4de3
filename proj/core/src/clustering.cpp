#include "mrad/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace mrad {
namespace {

// Union-find over converged point indices.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

// Per-row running sums of weight and weight * x, so the weight inside any
// horizontal run of a row costs two lookups.
class RowPrefix {
 public:
  RowPrefix(std::span<const WeightedPoint> points, int width, int height)
      : stride_(static_cast<std::size_t>(width) + 1),
        w_(stride_ * static_cast<std::size_t>(height), 0.0),
        wx_(w_.size(), 0.0) {
    for (const WeightedPoint& p : points) {
      const std::size_t i = static_cast<std::size_t>(p.y) * stride_ + static_cast<std::size_t>(p.x) + 1;
      w_[i] += p.weight;
      wx_[i] += p.weight * p.x;
    }
    for (int y = 0; y < height; ++y) {
      const std::size_t base = static_cast<std::size_t>(y) * stride_;
      for (std::size_t x = 1; x < stride_; ++x) {
        w_[base + x] += w_[base + x - 1];
        wx_[base + x] += wx_[base + x - 1];
      }
    }
  }

  // Sums over columns [xa, xb] of row y.
  double weight(int y, int xa, int xb) const { return span_sum(w_, y, xa, xb); }
  double weighted_x(int y, int xa, int xb) const { return span_sum(wx_, y, xa, xb); }

 private:
  double span_sum(const std::vector<double>& t, int y, int xa, int xb) const {
    const std::size_t base = static_cast<std::size_t>(y) * stride_;
    return t[base + static_cast<std::size_t>(xb) + 1] - t[base + static_cast<std::size_t>(xa)];
  }

  std::size_t stride_;
  std::vector<double> w_;
  std::vector<double> wx_;
};

struct Converged {
  Eigen::Vector2d position;
  int x0;
  int y0;
};

}  // namespace

void GrowConfig::validate() const {
  if (footprint_radius < 1) throw std::invalid_argument("footprint_radius must be >= 1");
  if (!(tolerance >= 0.0 && tolerance <= kScoreScale)) {
    throw std::invalid_argument("tolerance must lie in [0, 255]");
  }
  if (bandwidth && !(*bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  if (max_shift_iters < 1) throw std::invalid_argument("max_shift_iters must be >= 1");
  if (!(shift_convergence > 0.0)) throw std::invalid_argument("shift_convergence must be positive");
}

double GrowConfig::resolved_bandwidth(int width, int height) const {
  if (bandwidth) return *bandwidth;
  return kDefaultBandwidthFraction * std::hypot(static_cast<double>(width), static_cast<double>(height));
}

const char* to_string(Verdict verdict) noexcept {
  return verdict == Verdict::Anomalous ? "anomalous" : "normal";
}

std::vector<Eigen::Vector2d> mean_shift_modes(std::span<const WeightedPoint> points, int width,
                                              int height, double bandwidth, int max_iters,
                                              double convergence) {
  if (points.empty()) return {};
  // Lattice sums are independent of the order of `points`.
  const RowPrefix prefix(points, width, height);

  const double h2 = bandwidth * bandwidth;
  auto inside = [h2](double dx, double dy) { return dx * dx + dy * dy <= h2; };
  std::vector<Converged> converged;
  converged.reserve(points.size());
  for (const WeightedPoint& p : points) {
    Eigen::Vector2d pos(p.x, p.y);
    for (int it = 0; it < max_iters; ++it) {
      const int ya = std::max(0, static_cast<int>(std::ceil(pos.y() - bandwidth)));
      const int yb = std::min(height - 1, static_cast<int>(std::floor(pos.y() + bandwidth)));
      double sw = 0.0, sx = 0.0, sy = 0.0;
      for (int y = ya; y <= yb; ++y) {
        const double dy = y - pos.y();
        const double reach = std::sqrt(std::max(0.0, h2 - dy * dy));
        int xa = static_cast<int>(std::ceil(pos.x() - reach));
        int xb = static_cast<int>(std::floor(pos.x() + reach));
        // settle the run ends with the exact disk test, not the rounded root
        while (xa <= xb && !inside(xa - pos.x(), dy)) ++xa;
        while (inside(xa - 1 - pos.x(), dy)) --xa;
        while (xb >= xa && !inside(xb - pos.x(), dy)) --xb;
        while (inside(xb + 1 - pos.x(), dy)) ++xb;
        xa = std::max(xa, 0);
        xb = std::min(xb, width - 1);
        if (xa > xb) continue;
        const double rw = prefix.weight(y, xa, xb);
        sw += rw;
        sx += prefix.weighted_x(y, xa, xb);
        sy += rw * y;
      }
      if (sw <= 0.0) break;
      const Eigen::Vector2d next(sx / sw, sy / sw);
      const double step = (next - pos).norm();
      pos = next;
      if (step < convergence) break;
    }
    converged.push_back({pos, p.x, p.y});
  }

  // Canonical order so merging and centroid sums do not depend on input order.
  std::sort(converged.begin(), converged.end(), [](const Converged& a, const Converged& b) {
    return a.y0 != b.y0 ? a.y0 < b.y0 : a.x0 < b.x0;
  });

  const double merge = bandwidth / 2.0;
  const double bucket = std::max(merge, 1e-9);
  auto key = [bucket](const Eigen::Vector2d& v) {
    const auto bx = static_cast<std::int64_t>(std::floor(v.x() / bucket));
    const auto by = static_cast<std::int64_t>(std::floor(v.y() / bucket));
    return std::pair{bx, by};
  };
  auto pack = [](std::int64_t bx, std::int64_t by) {
    return (static_cast<std::uint64_t>(bx) << 32) ^ static_cast<std::uint64_t>(by & 0xffffffff);
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < converged.size(); ++i) {
    const auto [bx, by] = key(converged[i].position);
    buckets[pack(bx, by)].push_back(i);
  }
  DisjointSets sets(converged.size());
  for (std::size_t i = 0; i < converged.size(); ++i) {
    const auto [bx, by] = key(converged[i].position);
    for (std::int64_t dy = -1; dy <= 1; ++dy) {
      for (std::int64_t dx = -1; dx <= 1; ++dx) {
        const auto found = buckets.find(pack(bx + dx, by + dy));
        if (found == buckets.end()) continue;
        for (std::size_t j : found->second) {
          if (j <= i) continue;
          if ((converged[i].position - converged[j].position).norm() <= merge) sets.unite(i, j);
        }
      }
    }
  }

  std::vector<Eigen::Vector2d> sums;
  std::vector<double> counts;
  std::vector<std::size_t> slot(converged.size(), SIZE_MAX);
  for (std::size_t i = 0; i < converged.size(); ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] == SIZE_MAX) {
      slot[root] = sums.size();
      sums.emplace_back(Eigen::Vector2d::Zero());
      counts.push_back(0.0);
    }
    sums[slot[root]] += converged[i].position;
    counts[slot[root]] += 1.0;
  }
  std::vector<Eigen::Vector2d> modes;
  modes.reserve(sums.size());
  for (std::size_t m = 0; m < sums.size(); ++m) modes.push_back(sums[m] / counts[m]);
  return modes;
}

std::vector<Seed> mean_shift_seeds(const ScoreMap& map, const GrowConfig& config) {
  config.validate();
  std::vector<WeightedPoint> points;
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (map(x, y) > 0.0) points.push_back({x, y, map(x, y)});
    }
  }
  const auto modes =
      mean_shift_modes(points, map.width(), map.height(),
                       config.resolved_bandwidth(map.width(), map.height()),
                       config.max_shift_iters, config.shift_convergence);
  std::vector<Seed> seeds;
  for (const Eigen::Vector2d& m : modes) {
    const int x = std::clamp(static_cast<int>(std::lround(m.x())), 0, map.width() - 1);
    const int y = std::clamp(static_cast<int>(std::lround(m.y())), 0, map.height() - 1);
    if (map(x, y) > 0.0) seeds.push_back({x, y, map(x, y)});
  }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  });
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  return seeds;
}

BinaryMask region_grow(const ScoreMap& map, std::span<const Seed> seeds, const GrowConfig& config) {
  config.validate();
  BinaryMask mask(map.width(), map.height(), 0);
  // visit stamp per seed avoids clearing a visited raster for every seed
  Raster<std::uint32_t> stamp(map.width(), map.height(), 0);
  std::deque<std::pair<int, int>> queue;
  const int r = config.footprint_radius;
  std::uint32_t id = 0;
  for (const Seed& seed : seeds) {
    if (!map.contains(seed.x, seed.y)) {
      throw std::invalid_argument("region_grow: seed (" + std::to_string(seed.x) + ", " +
                                  std::to_string(seed.y) + ") outside " +
                                  std::to_string(map.width()) + "x" + std::to_string(map.height()));
    }
    ++id;
    stamp(seed.x, seed.y) = id;
    mask(seed.x, seed.y) = 1;
    queue.clear();
    queue.emplace_back(seed.x, seed.y);
    while (!queue.empty()) {
      const auto [cx, cy] = queue.front();
      queue.pop_front();
      for (int y = std::max(0, cy - r); y <= std::min(map.height() - 1, cy + r); ++y) {
        for (int x = std::max(0, cx - r); x <= std::min(map.width() - 1, cx + r); ++x) {
          if (stamp(x, y) == id) continue;
          stamp(x, y) = id;
          if (std::abs(map(x, y) - seed.score) <= config.tolerance) {
            mask(x, y) = 1;
            queue.emplace_back(x, y);
          }
        }
      }
    }
  }
  return mask;
}

DetectionResult classify(BinaryMask mask, std::size_t area_threshold) {
  DetectionResult result;
  result.pixel_count = static_cast<std::size_t>(
      std::count_if(mask.values().begin(), mask.values().end(), [](std::uint8_t b) { return b != 0; }));
  result.image_score = static_cast<double>(result.pixel_count);
  result.verdict = result.pixel_count > area_threshold ? Verdict::Anomalous : Verdict::Normal;
  result.anomaly_map = std::move(mask);
  return result;
}

}  // namespace mrad
