#pragma once

#include <optional>
#include <string>
#include <vector>

#include "datakit/frame.hpp"
#include "deteval/detector.hpp"

namespace framecast::det {

// Detection-level evaluation of predicted sequences against pseudo ground
// truth: the detector's own output on the corresponding real frames, with
// confidences reset to 1. Reported per class and per prediction step.

struct ApRow {
  std::string cls;
  int step = 0;  // 1-based
  std::optional<double> ap;
  int tp = 0, fp = 0, fn = 0;
};

struct APReport {
  std::string pipeline;
  std::string method;  // "voc11" or "all_points"
  double iou_threshold = 0.5;
  std::vector<ApRow> rows;  // classes x steps, class-major, sorted by name
};

// predicted[i][s] is compared against references built from real[i][s].
// Frame ids handed to the detector are i * steps + s. Predicted frames may
// be an integer upscale of the real frames (super-resolution); reference
// boxes are scaled to match before matching.
APReport evaluate_detection(const std::string& pipeline_label,
                            const std::vector<std::vector<data::Frame>>& predicted,
                            const std::vector<std::vector<data::Frame>>& real,
                            IDetector& prediction_detector, IDetector& reference_detector,
                            double iou_threshold = 0.5, bool eleven_point = true);

}  // namespace framecast::det
