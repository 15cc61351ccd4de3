#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "mrad/imaging.hpp"

namespace mrad {

enum class AnomalyShape { Blob, Bar };

struct AnomalySpec {
  AnomalyShape shape = AnomalyShape::Blob;
  double area_fraction = 0.005;  // of the image; >= 0.001
  double contrast = 0.6;         // (0, 1]
};

struct JitterSpec {
  double translation_px = 2.0;  // per-axis shift drawn from [-t, t]
  double gain = 0.05;           // query brightness factor 1 + gain * u, u in [-1, 1]
};

/// Parameters of one synthetic query / reference / mask triplet.
struct SceneParams {
  std::uint64_t seed = 0;
  int width = 480;
  int height = 270;
  double background_fraction = 0.5;  // share of black space
  std::optional<AnomalySpec> anomaly;
  JitterSpec jitter;
  double noise_sigma = 0.01;

  void validate() const;
};

struct Scene {
  ImageRGB query;
  ImageRGB reference;
  LabelMask mask;  // in query coordinates
  bool is_anomalous = false;
};

/// Deterministic in params.seed. The reference is a gradient-lit, textured
/// structure over black space with its own render noise; the query is the
/// same scene shifted by a sub-pixel-to-few-pixel translation, scaled by a
/// global gain, with independent noise and, optionally, a planted object
/// that overlaps the structure by at least half its area.
/// Throws GenerationError when no placement is found in 100 attempts.
Scene generate_scene(const SceneParams& params);

/// Per-scene parameters of a suite: seed = base_seed + index, and the first
/// ceil(fraction * count) indices of a seeded shuffle carry an anomaly.
/// Throws std::invalid_argument unless both classes are represented.
std::vector<SceneParams> plan_suite(int count, double anomalous_fraction, std::uint64_t base_seed,
                                    const SceneParams& base = {});

std::vector<Scene> generate_suite(int count, double anomalous_fraction, std::uint64_t base_seed,
                                  const SceneParams& base = {});

/// File stem used for scene `index` in exported datasets.
std::string scene_name(std::size_t index);

/// Writes query/, reference/, mask/ (anomalous scenes only) and labels.csv.
void export_suite(std::span<const SceneParams> plan, const std::filesystem::path& root);

}  // namespace mrad
