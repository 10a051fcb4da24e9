#pragma once

#include <optional>
#include <string>
#include <vector>

namespace framecast::det {

// Axis-aligned box in continuous pixel coordinates, [x_min, x_max) x
// [y_min, y_max). Boxes must have positive area.
struct DetectionBox {
  std::string label;
  double x_min = 0.0, y_min = 0.0, x_max = 0.0, y_max = 0.0;
  double confidence = 1.0;

  double area() const { return (x_max - x_min) * (y_max - y_min); }
};

// Intersection over union. Degenerate (zero or negative area) boxes throw
// std::invalid_argument.
double iou(const DetectionBox& a, const DetectionBox& b);

// Greedy one-to-one matching, class by class: predictions in descending
// confidence order claim the highest-IoU unmatched reference; a claim counts
// as a true positive when the IoU reaches the threshold. The threshold must
// lie in (0, 1].
struct MatchOutcome {
  std::string label;
  double confidence = 0.0;
  bool tp = false;
};

struct MatchResult {
  std::vector<MatchOutcome> outcomes;  // one per prediction
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;  // unmatched references
};

MatchResult match_detections(const std::vector<DetectionBox>& predictions,
                             const std::vector<DetectionBox>& references, double iou_threshold);

// Average precision over a pooled set of prediction outcomes, with
// total_references positives in the reference set. Confidence ties move
// through the precision/recall curve as a single block, which makes the
// streaming computation equal an exhaustive confidence-threshold sweep.
// Zero references make AP undefined: nullopt.
//
// eleven_point selects the 11-point interpolated variant (recall grid
// 0.0, 0.1, .., 1.0); otherwise the area under the interpolated envelope is
// integrated across all recall change points.
std::optional<double> average_precision(std::vector<MatchOutcome> outcomes, int total_references,
                                        bool eleven_point = true);

}  // namespace framecast::det
