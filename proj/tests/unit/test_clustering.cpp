#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mrad/clustering.hpp"
#include "oracles.hpp"

using namespace mrad;

namespace {

GrowConfig with_tolerance(double t) {
  GrowConfig c;
  c.tolerance = t;
  return c;
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

}  // namespace

TEST(MeanShift, EmptyMapHasNoSeeds) {
  EXPECT_TRUE(mean_shift_seeds(ScoreMap(50, 40, 0.0), GrowConfig{}).empty());
}

TEST(MeanShift, SingleBlobGivesOneCentredSeed) {
  ScoreMap m(100, 80, 0.0);
  for (int y = 30; y < 41; ++y)
    for (int x = 40; x < 53; ++x) m(x, y) = 180.0;
  GrowConfig cfg;
  cfg.bandwidth = 6.0;
  const auto seeds = mean_shift_seeds(m, cfg);
  ASSERT_EQ(seeds.size(), 1u);
  EXPECT_LE(std::hypot(seeds[0].x - 46.0, seeds[0].y - 35.0), 3.0);
  EXPECT_EQ(seeds[0].score, 180.0);
}

TEST(MeanShift, TwoSeparatedBlobs) {
  std::mt19937_64 rng(31);
  int hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double bw = 8.0;
    const auto pair = oracle::two_blobs(rng, 320, 240, bw);
    GrowConfig cfg;
    cfg.bandwidth = bw;
    const auto seeds = mean_shift_seeds(pair.map, cfg);
    if (seeds.size() != 2) continue;
    bool ok = true;
    for (const auto& c : pair.centroid) {
      const bool near = std::any_of(seeds.begin(), seeds.end(), [&](const Seed& s) {
        return std::hypot(s.x - c.x(), s.y - c.y()) <= bw / 2;
      });
      ok = ok && near;
    }
    hits += ok;
  }
  EXPECT_GE(hits, 95);
}

TEST(MeanShift, PermutationInvariantModes) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<WeightedPoint> pts;
    for (int i = 0; i < 300; ++i) {
      pts.push_back({static_cast<int>(rng() % 80), static_cast<int>(rng() % 60), oracle::uniform(rng, 1.0, 255.0)});
    }
    const auto a = mean_shift_modes(pts, 80, 60, 5.0, 100, 0.5);
    std::shuffle(pts.begin(), pts.end(), rng);
    const auto b = mean_shift_modes(pts, 80, 60, 5.0, 100, 0.5);
    auto as_set = [](const std::vector<Eigen::Vector2d>& v) {
      std::set<std::pair<long, long>> s;
      for (const auto& p : v) s.emplace(std::lround(p.x()), std::lround(p.y()));
      return s;
    };
    EXPECT_EQ(as_set(a), as_set(b));
  }
}

TEST(MeanShift, DefaultBandwidthIsTwoPercentOfDiagonal) {
  EXPECT_DOUBLE_EQ(GrowConfig{}.resolved_bandwidth(300, 400), 10.0);
  GrowConfig c;
  c.bandwidth = 3.5;
  EXPECT_DOUBLE_EQ(c.resolved_bandwidth(300, 400), 3.5);
}

TEST(MeanShift, SeedsSitOnPositiveScores) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    const ScoreMap m = oracle::piecewise_constant(rng, 60, 50);
    for (const Seed& s : mean_shift_seeds(m, GrowConfig{})) {
      EXPECT_GT(m(s.x, s.y), 0.0);
      EXPECT_EQ(s.score, m(s.x, s.y));
    }
  }
}

TEST(RegionGrow, ToleranceZeroMatchesFloodFill) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 64);
    const int h = 1 + static_cast<int>(rng() % 64);
    const ScoreMap m = oracle::piecewise_constant(rng, w, h);
    const int x = static_cast<int>(rng() % static_cast<unsigned>(w));
    const int y = static_cast<int>(rng() % static_cast<unsigned>(h));
    const Seed seed{x, y, m(x, y)};
    ASSERT_EQ(region_grow(m, std::span(&seed, 1), with_tolerance(0.0)), oracle::flood_fill(m, x, y, 1));
  }
}

TEST(RegionGrow, BlobComponentExactly) {
  ScoreMap m(30, 30, 0.0);
  for (int y = 5; y < 12; ++y)
    for (int x = 5; x < 12; ++x) m(x, y) = 200.0;
  m(12, 12) = 200.0;  // diagonal neighbour joins through the 3x3 footprint
  m(20, 20) = 200.0;  // separate component
  const Seed seed{7, 7, 200.0};
  const BinaryMask out = region_grow(m, std::span(&seed, 1), with_tolerance(0.0));
  EXPECT_EQ(out(12, 12), 1);
  EXPECT_EQ(out(20, 20), 0);
  EXPECT_EQ(std::count(out.values().begin(), out.values().end(), 1), 50);
}

TEST(RegionGrow, NoSeedsNoMask) {
  const ScoreMap m(10, 10, 100.0);
  const BinaryMask out = region_grow(m, {}, GrowConfig{});
  EXPECT_EQ(std::count(out.values().begin(), out.values().end(), 1), 0);
}

TEST(RegionGrow, FullToleranceCoversImage) {
  std::mt19937_64 rng(35);
  const ScoreMap m = oracle::piecewise_constant(rng, 40, 30);
  const Seed seed{3, 4, m(3, 4)};
  const BinaryMask out = region_grow(m, std::span(&seed, 1), with_tolerance(255.0));
  for (auto v : out.values()) EXPECT_EQ(v, 1);
}

TEST(RegionGrow, AnchorIsTheSeedScore) {
  // a ramp drifts 5 per pixel: growing from 100 with tolerance 12 stops two steps out
  ScoreMap m(11, 1, 0.0);
  for (int x = 0; x < 11; ++x) m(x, 0) = 100.0 + 5.0 * x;
  const Seed seed{0, 0, 100.0};
  const BinaryMask out = region_grow(m, std::span(&seed, 1), with_tolerance(12.0));
  EXPECT_EQ(std::count(out.values().begin(), out.values().end(), 1), 3);
}

TEST(RegionGrow, MonotoneInTolerance) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 50; ++trial) {
    ScoreMap m(40, 40);
    for (double& v : m.values()) v = oracle::uniform(rng) < 0.5 ? oracle::uniform(rng, 0.0, 255.0) : 0.0;
    std::vector<Seed> seeds;
    for (int i = 0; i < 3; ++i) {
      const int x = static_cast<int>(rng() % 40), y = static_cast<int>(rng() % 40);
      seeds.push_back({x, y, m(x, y)});
    }
    const double t1 = oracle::uniform(rng, 0.0, 100.0);
    const double t2 = t1 + oracle::uniform(rng, 0.0, 100.0);
    ASSERT_TRUE(subset(region_grow(m, seeds, with_tolerance(t1)), region_grow(m, seeds, with_tolerance(t2))));
  }
}

TEST(RegionGrow, WiderFootprintBridgesGaps) {
  ScoreMap m(9, 1, 0.0);
  m(0, 0) = 100.0;
  m(2, 0) = 100.0;
  const Seed seed{0, 0, 100.0};
  GrowConfig cfg = with_tolerance(0.0);
  // radius 1: the zero at x = 1 differs by 100 and blocks growth
  EXPECT_EQ(region_grow(m, std::span(&seed, 1), cfg)(2, 0), 0);
  cfg.footprint_radius = 2;
  EXPECT_EQ(region_grow(m, std::span(&seed, 1), cfg)(2, 0), 1);
}

TEST(RegionGrow, OutOfBoundsSeedThrows) {
  const ScoreMap m(5, 5, 0.0);
  const Seed seed{5, 0, 1.0};
  EXPECT_THROW(region_grow(m, std::span(&seed, 1), GrowConfig{}), std::invalid_argument);
}

TEST(Classify, Boundaries) {
  const DetectionResult empty = classify(BinaryMask(20, 20, 0), 0);
  EXPECT_EQ(empty.verdict, Verdict::Normal);
  EXPECT_EQ(empty.image_score, 0.0);

  BinaryMask m(20, 20, 0);
  for (int i = 0; i < 100; ++i) m[static_cast<std::size_t>(i)] = 1;
  EXPECT_EQ(classify(m, 99).verdict, Verdict::Anomalous);
  EXPECT_EQ(classify(m, 100).verdict, Verdict::Normal);
  EXPECT_EQ(classify(m, 100).pixel_count, 100u);
  EXPECT_EQ(classify(m, 100).image_score, 100.0);
}

TEST(Classify, AddingBitsNeverClearsAnomalous) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    BinaryMask m(30, 30, 0);
    for (auto& v : m.values()) v = oracle::uniform(rng) < 0.1 ? 1 : 0;
    const std::size_t threshold = rng() % 120;
    const Verdict before = classify(m, threshold).verdict;
    for (auto& v : m.values()) v = v || oracle::uniform(rng) < 0.05;
    if (before == Verdict::Anomalous) { EXPECT_EQ(classify(m, threshold).verdict, Verdict::Anomalous); }
  }
}

TEST(GrowConfig, Validation) {
  GrowConfig c;
  EXPECT_NO_THROW(c.validate());
  c.footprint_radius = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.tolerance = 300.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.bandwidth = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
