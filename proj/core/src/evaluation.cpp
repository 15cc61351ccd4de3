#include "mrad/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "mrad/error.hpp"

namespace mrad {
namespace {

void count_classes(std::span<const TieGroup> groups, std::size_t& pos, std::size_t& neg) {
  pos = 0;
  neg = 0;
  for (const TieGroup& g : groups) {
    pos += g.positives;
    neg += g.negatives;
  }
}

// Appends descending runs of equal values from a descending-sorted vector.
void merge_descending(const std::vector<double>& pos, const std::vector<double>& neg,
                      std::size_t zero_pos, std::size_t zero_neg, std::vector<TieGroup>& out) {
  std::size_t i = 0, j = 0;
  while (i < pos.size() || j < neg.size()) {
    double v;
    if (j == neg.size() || (i < pos.size() && pos[i] >= neg[j])) {
      v = pos[i];
    } else {
      v = neg[j];
    }
    TieGroup g{v, 0, 0};
    while (i < pos.size() && pos[i] == v) ++g.positives, ++i;
    while (j < neg.size() && neg[j] == v) ++g.negatives, ++j;
    if (v == 0.0) {
      g.positives += zero_pos;
      g.negatives += zero_neg;
      zero_pos = zero_neg = 0;
    }
    if (v < 0.0 && (zero_pos || zero_neg)) {
      // zeros sort above negative scores
      out.push_back({0.0, zero_pos, zero_neg});
      zero_pos = zero_neg = 0;
    }
    out.push_back(g);
  }
  if (zero_pos || zero_neg) out.push_back({0.0, zero_pos, zero_neg});
}

}  // namespace

std::vector<TieGroup> tie_groups(const LabeledScores& data) {
  if (data.scores.size() != data.labels.size()) {
    throw std::invalid_argument("labeled scores: " + std::to_string(data.scores.size()) +
                                " scores but " + std::to_string(data.labels.size()) + " labels");
  }
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < data.scores.size(); ++i) {
    if (std::isnan(data.scores[i])) throw std::invalid_argument("labeled scores: NaN score");
    (data.labels[i] ? pos : neg).push_back(data.scores[i]);
  }
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  std::vector<TieGroup> groups;
  merge_descending(pos, neg, 0, 0, groups);
  return groups;
}

double auroc(std::span<const TieGroup> descending) {
  std::size_t pos = 0, neg = 0;
  count_classes(descending, pos, neg);
  if (pos == 0 || neg == 0) throw UndefinedMetric("AUROC needs both positive and negative labels");
  // Walk from the lowest score upwards counting negatives strictly below.
  double wins = 0.0;
  double neg_below = 0.0;
  for (auto it = descending.rbegin(); it != descending.rend(); ++it) {
    wins += static_cast<double>(it->positives) * (neg_below + 0.5 * static_cast<double>(it->negatives));
    neg_below += static_cast<double>(it->negatives);
  }
  return wins / (static_cast<double>(pos) * static_cast<double>(neg));
}

double auroc(const LabeledScores& data) {
  const auto groups = tie_groups(data);
  return auroc(std::span<const TieGroup>(groups));
}

double average_precision(std::span<const TieGroup> descending) {
  std::size_t pos = 0, neg = 0;
  count_classes(descending, pos, neg);
  if (pos == 0) throw UndefinedMetric("average precision needs at least one positive label");
  double ap = 0.0;
  double tp = 0.0, fp = 0.0;
  for (const TieGroup& g : descending) {
    tp += static_cast<double>(g.positives);
    fp += static_cast<double>(g.negatives);
    if (g.positives > 0) {
      ap += (static_cast<double>(g.positives) / static_cast<double>(pos)) * (tp / (tp + fp));
    }
  }
  return ap;
}

double average_precision(const LabeledScores& data) {
  const auto groups = tie_groups(data);
  return average_precision(std::span<const TieGroup>(groups));
}

void ScorePool::add(double score, bool positive) {
  if (std::isnan(score)) throw std::invalid_argument("score pool: NaN score");
  if (score == 0.0) {
    ++(positive ? zero_positives_ : zero_negatives_);
  } else {
    (positive ? positive_ : negative_).push_back(score);
  }
}

void ScorePool::add_image(const Raster<double>& eval, const LabelMask& truth) {
  if (!eval.same_shape(truth)) {
    throw std::invalid_argument("score map is " + std::to_string(eval.width()) + "x" +
                                std::to_string(eval.height()) + " but mask is " +
                                std::to_string(truth.width()) + "x" + std::to_string(truth.height()));
  }
  for (std::size_t i = 0; i < eval.size(); ++i) add(eval[i], truth[i] == Label::Anomaly);
}

std::vector<TieGroup> ScorePool::groups() const {
  std::vector<double> pos = positive_;
  std::vector<double> neg = negative_;
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());
  std::vector<TieGroup> out;
  merge_descending(pos, neg, zero_positives_, zero_negatives_, out);
  return out;
}

void RunEvaluator::add(const std::string& id, const DetectionResult& result,
                       const PixelEvalMap& eval, const LabelMask& truth, bool is_anomalous) {
  if (!result.anomaly_map.same_shape(eval)) {
    throw std::invalid_argument("'" + id + "': anomaly map and score map differ in size");
  }
  ScorePool image_pool;
  image_pool.add_image(eval, truth);  // validates eval vs truth
  pixels_.add_image(eval, truth);

  ImageRecord record;
  record.id = id;
  record.image_score = result.image_score;
  record.verdict = result.verdict;
  record.is_anomalous = is_anomalous;
  if (image_pool.positives() > 0) {
    const auto groups = image_pool.groups();
    record.pixel_ap = average_precision(std::span<const TieGroup>(groups));
  }
  records_.push_back(std::move(record));
  images_.scores.push_back(result.image_score);
  images_.labels.push_back(is_anomalous ? 1 : 0);
}

MetricsReport RunEvaluator::finish(nlohmann::json config_snapshot) const {
  MetricsReport report;
  report.per_image = records_;
  report.config = std::move(config_snapshot);
  try {
    report.i_auroc = auroc(images_);
  } catch (const UndefinedMetric& e) {
    report.warnings.push_back(std::string("I.AUROC undefined: ") + e.what());
  }
  const auto groups = pixels_.groups();
  try {
    report.p_auroc = auroc(std::span<const TieGroup>(groups));
  } catch (const UndefinedMetric& e) {
    report.warnings.push_back(std::string("P.AUROC undefined: ") + e.what());
  }
  try {
    report.p_ap = average_precision(std::span<const TieGroup>(groups));
  } catch (const UndefinedMetric& e) {
    report.warnings.push_back(std::string("P.AP undefined: ") + e.what());
  }
  return report;
}

MetricsReport evaluate_run(std::span<const EvalItem> items, nlohmann::json config_snapshot) {
  RunEvaluator evaluator;
  for (const EvalItem& item : items) {
    evaluator.add(item.id, item.result, item.eval, item.truth, item.is_anomalous);
  }
  return evaluator.finish(std::move(config_snapshot));
}

}  // namespace mrad
