// Per-stage cost of the pipeline on fixture scenes. Sizes are image widths at
// 16:9; the default fixture is 480x270.

#include <benchmark/benchmark.h>

#include <vector>

#include "mrad/clustering.hpp"
#include "mrad/denoise.hpp"
#include "mrad/detectors.hpp"
#include "mrad/evaluation.hpp"
#include "mrad/fixtures.hpp"
#include "mrad/statistics.hpp"

using namespace mrad;

namespace {

Scene scene_of_width(int width) {
  SceneParams p;
  p.seed = 42;
  p.width = width;
  p.height = width * 9 / 16;
  p.anomaly = AnomalySpec{};
  return generate_scene(p);
}

void Sizes(benchmark::internal::Benchmark* b) {
  for (int w : {240, 480, 960, 1920}) b->Arg(w);
  b->Unit(benchmark::kMillisecond);
}

void BM_ScoreMap(benchmark::State& state) {
  const Scene s = scene_of_width(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(score_map(s.query, s.reference, ScoringConfig{}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.query.size()));
}
BENCHMARK(BM_ScoreMap)->Apply(Sizes);

void BM_Denoise(benchmark::State& state) {
  const Scene s = scene_of_width(static_cast<int>(state.range(0)));
  const ScoringConfig sc;
  const ScoreMap scores = score_map(s.query, s.reference, sc);
  for (auto _ : state) benchmark::DoNotOptimize(denoise(scores, sc.grid, 0.0, DenoiseConfig{}));
}
BENCHMARK(BM_Denoise)->Apply(Sizes);

void BM_GaussianBlur(benchmark::State& state) {
  const Scene s = scene_of_width(static_cast<int>(state.range(0)));
  const ScoreMap scores = score_map(s.query, s.reference, ScoringConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_blur(scores, 2.0, 5));
}
BENCHMARK(BM_GaussianBlur)->Apply(Sizes);

void BM_MeanShiftAndGrow(benchmark::State& state) {
  const Scene s = scene_of_width(static_cast<int>(state.range(0)));
  const MradTrace t = trace_mrad(s.query, s.reference, DetectorConfig{});
  const GrowConfig grow;
  for (auto _ : state) {
    const auto seeds = mean_shift_seeds(t.denoised, grow);
    benchmark::DoNotOptimize(region_grow(t.denoised, seeds, grow));
  }
}
BENCHMARK(BM_MeanShiftAndGrow)->Apply(Sizes);

void BM_Detect(benchmark::State& state) {
  const Scene s = scene_of_width(480);
  DetectorConfig cfg;
  cfg.algorithm = static_cast<Algorithm>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(detect(s.query, &s.reference, cfg));
  state.SetLabel(to_string(cfg.algorithm));
}
BENCHMARK(BM_Detect)
    ->Arg(static_cast<int>(Algorithm::RXD))
    ->Arg(static_cast<int>(Algorithm::PAD))
    ->Arg(static_cast<int>(Algorithm::MRAD))
    ->Unit(benchmark::kMillisecond);

void BM_PooledPixelMetrics(benchmark::State& state) {
  std::vector<Scene> scenes;
  std::vector<Detection> detections;
  for (const auto& p : plan_suite(static_cast<int>(state.range(0)), 0.5, 7)) {
    scenes.push_back(generate_scene(p));
    detections.push_back(detect_mrad(scenes.back().query, scenes.back().reference, DetectorConfig{}));
  }
  for (auto _ : state) {
    RunEvaluator ev;
    for (std::size_t i = 0; i < scenes.size(); ++i) {
      ev.add(scene_name(i), detections[i].result, detections[i].eval, scenes[i].mask, scenes[i].is_anomalous);
    }
    benchmark::DoNotOptimize(ev.finish());
  }
}
BENCHMARK(BM_PooledPixelMetrics)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_GenerateScene(benchmark::State& state) {
  SceneParams p;
  p.anomaly = AnomalySpec{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_scene(p));
    ++p.seed;
  }
}
BENCHMARK(BM_GenerateScene)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
