#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mrad/clustering.hpp"
#include "mrad/detectors.hpp"
#include "mrad/imaging.hpp"

namespace mrad {

struct LabeledScores {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;  // 1 = positive (anomalous)
};

/// Scores sharing one value, with the number of positives / negatives at it.
struct TieGroup {
  double score = 0.0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

/// Groups sorted by descending score.
std::vector<TieGroup> tie_groups(const LabeledScores& data);

/// Mann-Whitney AUROC with ties worth 1/2. Throws UndefinedMetric unless both
/// classes are present, std::invalid_argument on length mismatch.
double auroc(const LabeledScores& data);
double auroc(std::span<const TieGroup> descending);

/// Step-wise AP = sum_n (R_n - R_{n-1}) P_n over descending distinct scores.
/// Throws UndefinedMetric when there is no positive.
double average_precision(const LabeledScores& data);
double average_precision(std::span<const TieGroup> descending);

/// Pooled pixel scores. Zeros are only counted, which keeps sparse maps cheap.
class ScorePool {
 public:
  void add(double score, bool positive);
  /// Adds every pixel of `eval`, positive where `truth` is Anomaly.
  void add_image(const Raster<double>& eval, const LabelMask& truth);

  std::size_t positives() const noexcept { return positive_.size() + zero_positives_; }
  std::size_t negatives() const noexcept { return negative_.size() + zero_negatives_; }

  std::vector<TieGroup> groups() const;

 private:
  std::vector<double> positive_;
  std::vector<double> negative_;
  std::size_t zero_positives_ = 0;
  std::size_t zero_negatives_ = 0;
};

struct ImageRecord {
  std::string id;
  double image_score = 0.0;
  Verdict verdict = Verdict::Normal;
  bool is_anomalous = false;
  std::optional<double> pixel_ap;  // AP over this image's pixels; unset without anomaly pixels
};

struct MetricsReport {
  std::optional<double> i_auroc;
  std::optional<double> p_auroc;
  std::optional<double> p_ap;
  std::vector<ImageRecord> per_image;
  nlohmann::json config;
  std::vector<std::string> warnings;
};

struct EvalItem {
  std::string id;
  DetectionResult result;
  PixelEvalMap eval;
  LabelMask truth;
  bool is_anomalous = false;
};

/// Streaming form of evaluate_run: items are folded in one at a time so the
/// per-image rasters need not be kept alive.
class RunEvaluator {
 public:
  /// Throws std::invalid_argument when eval / truth / mask sizes disagree.
  void add(const std::string& id, const DetectionResult& result, const PixelEvalMap& eval,
           const LabelMask& truth, bool is_anomalous);
  MetricsReport finish(nlohmann::json config_snapshot = nlohmann::json::object()) const;

 private:
  ScorePool pixels_;
  LabeledScores images_;
  std::vector<ImageRecord> records_;
};

/// I.AUROC over (image_score, label); P.AUROC and P.AP over the pixels of all
/// images pooled together. Undefined metrics are left unset with a warning.
MetricsReport evaluate_run(std::span<const EvalItem> items,
                           nlohmann::json config_snapshot = nlohmann::json::object());

}  // namespace mrad
