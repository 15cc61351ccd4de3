#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "mrad/denoise.hpp"
#include "oracles.hpp"

using namespace mrad;

TEST(Saturate, MostlyAboveFillsCell) {
  ScoreMap m(20, 20, 0.0);
  // top-left 10x10 cell: 95 of 100 pixels above the minimum
  for (int i = 0; i < 95; ++i) m(i % 10, i / 10) = 30.0;
  const ScoreMap out = saturate_cells(m, {2, 2}, 20.0, 0.9);
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) EXPECT_EQ(out(x, y), x < 10 && y < 10 ? 255.0 : 0.0);
  }
}

TEST(Saturate, ZeroCellUnchanged) {
  const ScoreMap m(16, 16, 0.0);
  EXPECT_EQ(saturate_cells(m, {2, 2}, 0.0, 0.9), m);
}

TEST(Saturate, ExactFractionIsNotEnough) {
  ScoreMap m(10, 10, 0.0);
  for (int i = 0; i < 90; ++i) m(i % 10, i / 10) = 50.0;
  EXPECT_EQ(saturate_cells(m, {1, 1}, 20.0, 0.9), m);
  m(0, 9) = 50.0;
  EXPECT_EQ(saturate_cells(m, {1, 1}, 20.0, 0.9)(5, 9), 255.0);
}

TEST(Saturate, ComparesStrictlyWithMinimum) {
  const ScoreMap m(4, 4, 20.0);
  EXPECT_EQ(saturate_cells(m, {1, 1}, 20.0, 0.5), m);
}

TEST(KernelSide, OddAndAtLeastThree) {
  EXPECT_EQ(stddev_kernel_side({0, 0, 10, 10}, 0.1), 3);
  EXPECT_EQ(stddev_kernel_side({0, 0, 480, 270}, 0.1), 27);
  EXPECT_EQ(stddev_kernel_side({0, 0, 120, 80}, 0.1), 9);
  EXPECT_EQ(stddev_kernel_side({0, 0, 100, 100}, 0.1), 11);
  for (int s = 1; s < 300; s += 7) {
    const int k = stddev_kernel_side({0, 0, s, s + 3}, 0.1);
    EXPECT_EQ(k % 2, 1);
    EXPECT_GE(k, 3);
  }
}

TEST(LocalStddev, MatchesSlidingWindowOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 8 + static_cast<int>(rng() % 30);
    const int h = 8 + static_cast<int>(rng() % 30);
    const ScoreMap m = oracle::mixed_cells(rng, w, h, {2, 2});
    for (const auto& cell : partition(w, h, {2, 2})) {
      const int k = 3 + 2 * static_cast<int>(rng() % 3);
      const auto sd = local_stddev(m, cell, k);
      for (int y = cell.y0; y < cell.y1; ++y) {
        for (int x = cell.x0; x < cell.x1; ++x) {
          const double got = sd[static_cast<std::size_t>((y - cell.y0) * cell.width() + (x - cell.x0))];
          ASSERT_NEAR(got, oracle::window_stddev(m, cell, x, y, k), 1e-6);
        }
      }
    }
  }
}

TEST(Suppress, UniformCellCleared) {
  const ScoreMap m(30, 30, 120.0);
  const ScoreMap out = local_stddev_suppress(m, {1, 1}, DenoiseConfig{});
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(Suppress, SharpBlobKept) {
  ScoreMap m(40, 40, 0.0);
  for (int y = 15; y < 25; ++y)
    for (int x = 15; x < 25; ++x) m(x, y) = 200.0;
  EXPECT_EQ(local_stddev_suppress(m, {1, 1}, DenoiseConfig{}), m);
}

TEST(Suppress, ZeroCellStaysZero) {
  const ScoreMap m(16, 16, 0.0);
  EXPECT_EQ(local_stddev_suppress(m, {2, 2}, DenoiseConfig{}), m);
}

TEST(Suppress, OnlyWholeCellsAreCleared) {
  ScoreMap m(40, 20, 0.0);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) m(x, y) = 80.0;  // flat left cell
  for (int y = 5; y < 12; ++y)
    for (int x = 25; x < 32; ++x) m(x, y) = 200.0;  // blob in the right cell
  const ScoreMap out = local_stddev_suppress(m, {1, 2}, DenoiseConfig{});
  for (int y = 0; y < 20; ++y) {
    for (int x = 0; x < 20; ++x) ASSERT_EQ(out(x, y), 0.0);
    for (int x = 20; x < 40; ++x) ASSERT_EQ(out(x, y), m(x, y));
  }
}

TEST(Idempotence, SaturateAndSuppress) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const GridSpec grid{1 + static_cast<int>(rng() % 4), 1 + static_cast<int>(rng() % 4)};
    const int w = 16 + static_cast<int>(rng() % 49);
    const int h = 16 + static_cast<int>(rng() % 49);
    const ScoreMap m = oracle::mixed_cells(rng, w, h, grid);
    const ScoreMap s1 = saturate_cells(m, grid, 20.0, 0.9);
    ASSERT_EQ(saturate_cells(s1, grid, 20.0, 0.9), s1);
    const ScoreMap p1 = local_stddev_suppress(m, grid, DenoiseConfig{});
    ASSERT_EQ(local_stddev_suppress(p1, grid, DenoiseConfig{}), p1);
  }
}

TEST(Blur, KernelIsNormalisedAndSymmetric) {
  const auto k = gaussian_kernel(2.0, 5);
  ASSERT_EQ(k.size(), 11u);
  EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-15);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(k[static_cast<std::size_t>(i)], k[static_cast<std::size_t>(10 - i)]);
  EXPECT_THROW(gaussian_kernel(0.0, 5), std::invalid_argument);
  EXPECT_THROW(gaussian_kernel(1.0, 0), std::invalid_argument);
}

TEST(Blur, ReflectIndex) {
  // d c b | a b c d | c b a
  EXPECT_EQ(reflect_index(-1, 4), 1);
  EXPECT_EQ(reflect_index(-3, 4), 3);
  EXPECT_EQ(reflect_index(4, 4), 2);
  EXPECT_EQ(reflect_index(6, 4), 0);
  EXPECT_EQ(reflect_index(-7, 4), 1);
  EXPECT_EQ(reflect_index(5, 1), 0);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(reflect_index(i, 4), i);
}

TEST(Blur, ConstantPreserved) {
  const ScoreMap m(20, 15, 77.0);
  const ScoreMap out = gaussian_blur(m, 2.0, 5);
  for (double v : out.values()) EXPECT_NEAR(v, 77.0, 1e-9);
}

TEST(Blur, ZeroStaysZero) {
  const ScoreMap m(20, 15, 0.0);
  EXPECT_EQ(gaussian_blur(m, 2.0, 5), m);
}

TEST(Blur, ImpulseResponse) {
  ScoreMap m(21, 21, 0.0);
  m(10, 10) = 255.0;
  const ScoreMap out = gaussian_blur(m, 2.0, 5);
  const auto k = gaussian_kernel(2.0, 5);
  EXPECT_NEAR(out(10, 10), 255.0 * k[5] * k[5], 1e-9);
  EXPECT_NEAR(out(10, 10), oracle::dense_blur(m, 2.0, 5)(10, 10), 1e-9);
}

TEST(Blur, SeparableEqualsDense) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 64);
    const int h = 1 + static_cast<int>(rng() % 64);
    ScoreMap m(w, h);
    for (double& v : m.values()) v = oracle::uniform(rng, 0.0, 255.0);
    const double sigma = oracle::uniform(rng, 0.5, 3.0);
    const int radius = 1 + static_cast<int>(rng() % 6);
    const ScoreMap a = gaussian_blur(m, sigma, radius);
    const ScoreMap b = oracle::dense_blur(m, sigma, radius);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(Blur, MassPreservedAwayFromBorder) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    ScoreMap m(48, 40, 0.0);
    // content stays 2 radii clear of the border so no reflected tap reaches it
    for (int y = 10; y < 30; ++y)
      for (int x = 10; x < 38; ++x) m(x, y) = oracle::uniform(rng) < 0.3 ? oracle::uniform(rng, 0.0, 255.0) : 0.0;
    const ScoreMap out = gaussian_blur(m, 2.0, 5);
    const double before = std::accumulate(m.values().begin(), m.values().end(), 0.0);
    const double after = std::accumulate(out.values().begin(), out.values().end(), 0.0);
    EXPECT_NEAR(after, before, 1e-3 * before);
  }
}

TEST(Denoise, FixedOrder) {
  std::mt19937_64 rng(25);
  const GridSpec grid{2, 2};
  const DenoiseConfig cfg;
  const ScoreMap m = oracle::mixed_cells(rng, 48, 32, grid);
  const ScoreMap expected = gaussian_blur(
      local_stddev_suppress(saturate_cells(m, grid, 0.0, cfg.saturation_fraction), grid, cfg),
      cfg.blur_sigma, cfg.blur_radius);
  EXPECT_EQ(denoise(m, grid, 0.0, cfg), expected);
}

TEST(DenoiseConfig, Validation) {
  DenoiseConfig c;
  EXPECT_NO_THROW(c.validate());
  c.saturation_fraction = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.kernel_fraction = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.blur_radius = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.blur_sigma = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
