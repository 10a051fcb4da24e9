#include "deteval/evaluate.hpp"

#include <map>
#include <set>
#include <stdexcept>

namespace framecast::det {

APReport evaluate_detection(const std::string& pipeline_label,
                            const std::vector<std::vector<data::Frame>>& predicted,
                            const std::vector<std::vector<data::Frame>>& real,
                            IDetector& prediction_detector, IDetector& reference_detector,
                            double iou_threshold, bool eleven_point) {
  if (predicted.empty() || predicted.size() != real.size())
    throw std::invalid_argument("evaluate_detection: need matching non-empty sequence sets");
  const size_t steps = predicted.front().size();
  if (steps == 0) throw std::invalid_argument("evaluate_detection: empty sequences");
  for (size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i].size() != steps || real[i].size() != steps)
      throw std::invalid_argument("evaluate_detection: sequences must share step count");

  // Super-resolution pipelines evaluate at the enlarged size; reference
  // boxes are stretched by the same integer factor.
  const data::Frame& p0 = predicted.front().front();
  const data::Frame& r0 = real.front().front();
  if (p0.height % r0.height != 0 || p0.width % r0.width != 0)
    throw std::invalid_argument("evaluate_detection: predicted dims must be a multiple of real");
  const double sy = static_cast<double>(p0.height) / r0.height;
  const double sx = static_cast<double>(p0.width) / r0.width;

  // Pool matches per (class, step) across the whole set.
  struct Pool {
    std::vector<MatchOutcome> outcomes;
    int refs = 0, tp = 0, fp = 0, fn = 0;
  };
  std::map<std::string, std::map<int, Pool>> pools;
  std::set<std::string> classes;

  for (size_t i = 0; i < predicted.size(); ++i) {
    for (size_t s = 0; s < steps; ++s) {
      const int64_t frame_id = static_cast<int64_t>(i) * static_cast<int64_t>(steps) +
                               static_cast<int64_t>(s);
      std::vector<DetectionBox> refs = reference_detector.detect(real[i][s], frame_id);
      for (DetectionBox& b : refs) {
        b.confidence = 1.0;
        b.x_min *= sx;
        b.x_max *= sx;
        b.y_min *= sy;
        b.y_max *= sy;
      }
      const std::vector<DetectionBox> preds =
          prediction_detector.detect(predicted[i][s], frame_id);

      // Class partition of this frame pair.
      std::set<std::string> frame_classes;
      for (const auto& b : refs) frame_classes.insert(b.label);
      for (const auto& b : preds) frame_classes.insert(b.label);
      for (const std::string& cls : frame_classes) {
        std::vector<DetectionBox> cp, cr;
        for (const auto& b : preds)
          if (b.label == cls) cp.push_back(b);
        for (const auto& b : refs)
          if (b.label == cls) cr.push_back(b);
        const MatchResult mr = match_detections(cp, cr, iou_threshold);
        Pool& pool = pools[cls][static_cast<int>(s)];
        pool.outcomes.insert(pool.outcomes.end(), mr.outcomes.begin(), mr.outcomes.end());
        pool.refs += static_cast<int>(cr.size());
        pool.tp += mr.true_positives;
        pool.fp += mr.false_positives;
        pool.fn += mr.false_negatives;
      }
      for (const auto& b : refs) classes.insert(b.label);
    }
  }

  APReport report;
  report.pipeline = pipeline_label;
  report.method = eleven_point ? "voc11" : "all_points";
  report.iou_threshold = iou_threshold;
  // Rows for every reference class at every step, even where empty, so the
  // report shape is classes x steps.
  for (const std::string& cls : classes) {
    for (size_t s = 0; s < steps; ++s) {
      ApRow row;
      row.cls = cls;
      row.step = static_cast<int>(s) + 1;
      auto cit = pools.find(cls);
      if (cit != pools.end()) {
        auto sit = cit->second.find(static_cast<int>(s));
        if (sit != cit->second.end()) {
          const Pool& pool = sit->second;
          row.ap = average_precision(pool.outcomes, pool.refs, eleven_point);
          row.tp = pool.tp;
          row.fp = pool.fp;
          row.fn = pool.fn;
        }
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

}  // namespace framecast::det
