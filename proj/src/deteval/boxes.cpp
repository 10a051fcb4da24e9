#include "deteval/boxes.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace framecast::det {

double iou(const DetectionBox& a, const DetectionBox& b) {
  if (!(a.area() > 0.0) || !(b.area() > 0.0))
    throw std::invalid_argument("iou: degenerate box");
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  return inter / (a.area() + b.area() - inter);
}

MatchResult match_detections(const std::vector<DetectionBox>& predictions,
                             const std::vector<DetectionBox>& references, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw std::invalid_argument("match_detections: threshold must lie in (0,1]");

  MatchResult result;

  // Partition both sides by class; matching never crosses labels.
  std::map<std::string, std::vector<size_t>> preds_by_class, refs_by_class;
  for (size_t i = 0; i < predictions.size(); ++i)
    preds_by_class[predictions[i].label].push_back(i);
  for (size_t i = 0; i < references.size(); ++i)
    refs_by_class[references[i].label].push_back(i);

  for (auto& [label, pred_idx] : preds_by_class) {
    std::stable_sort(pred_idx.begin(), pred_idx.end(), [&](size_t l, size_t r) {
      return predictions[l].confidence > predictions[r].confidence;
    });
    auto rit = refs_by_class.find(label);
    std::vector<size_t> ref_idx = rit == refs_by_class.end() ? std::vector<size_t>{} : rit->second;
    std::vector<bool> taken(ref_idx.size(), false);

    for (size_t pi : pred_idx) {
      double best = 0.0;
      size_t best_j = ref_idx.size();
      for (size_t j = 0; j < ref_idx.size(); ++j) {
        if (taken[j]) continue;
        const double v = iou(predictions[pi], references[ref_idx[j]]);
        if (v > best) {
          best = v;
          best_j = j;
        }
      }
      MatchOutcome o;
      o.label = label;
      o.confidence = predictions[pi].confidence;
      o.tp = best_j < ref_idx.size() && best >= iou_threshold;
      if (o.tp) {
        taken[best_j] = true;
        ++result.true_positives;
      } else {
        ++result.false_positives;
      }
      result.outcomes.push_back(std::move(o));
    }
  }
  result.false_negatives = static_cast<int>(references.size()) - result.true_positives;
  return result;
}

std::optional<double> average_precision(std::vector<MatchOutcome> outcomes, int total_references,
                                        bool eleven_point) {
  if (total_references < 0)
    throw std::invalid_argument("average_precision: negative reference count");
  if (total_references == 0) return std::nullopt;

  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const MatchOutcome& a, const MatchOutcome& b) {
                     return a.confidence > b.confidence;
                   });

  // Walk the list in blocks of equal confidence; each block contributes one
  // precision/recall point, exactly as a threshold sweep would see it.
  struct PrPoint {
    double recall, precision;
  };
  std::vector<PrPoint> points;
  int tp = 0, fp = 0;
  size_t i = 0;
  while (i < outcomes.size()) {
    size_t j = i;
    while (j < outcomes.size() && outcomes[j].confidence == outcomes[i].confidence) {
      if (outcomes[j].tp)
        ++tp;
      else
        ++fp;
      ++j;
    }
    points.push_back({static_cast<double>(tp) / total_references,
                      static_cast<double>(tp) / static_cast<double>(tp + fp)});
    i = j;
  }

  if (eleven_point) {
    double acc = 0.0;
    for (int k = 0; k <= 10; ++k) {
      const double r = k / 10.0;
      double best = 0.0;
      for (const PrPoint& p : points)
        if (p.recall >= r && p.precision > best) best = p.precision;
      acc += best;
    }
    return acc / 11.0;
  }

  // All-points variant: integrate the running-max precision envelope over
  // recall.
  double acc = 0.0;
  double prev_recall = 0.0;
  for (size_t k = 0; k < points.size(); ++k) {
    double env = 0.0;
    for (size_t q = k; q < points.size(); ++q) env = std::max(env, points[q].precision);
    acc += (points[k].recall - prev_recall) * env;
    prev_recall = points[k].recall;
  }
  return acc;
}

}  // namespace framecast::det
