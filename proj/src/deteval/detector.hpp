#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "datakit/frame.hpp"
#include "deteval/boxes.hpp"

namespace framecast::det {

// Detector backends. detect() must be deterministic: same frame, same id,
// same boxes. The frame id exists for backends that look detections up
// rather than compute them.
class IDetector {
 public:
  virtual ~IDetector() = default;
  virtual std::vector<DetectionBox> detect(const data::Frame& frame, int64_t frame_id) = 0;
};

// Threshold + connected components detector for the synthetic shape scenes.
// Pixels with luma above the threshold form 4-connected components; each
// sufficiently large component becomes one detection. The label comes from
// how much of the bounding box the component fills (squares fill it almost
// completely, circles reach about pi/4), and the confidence is the mean luma
// of the component, so blur both shrinks components and lowers confidence.
struct ToyDetectorParams {
  double threshold = 0.5;
  int min_area = 6;
  double fill_cutoff = 0.85;
};

class ToyDetector : public IDetector {
 public:
  explicit ToyDetector(ToyDetectorParams params = {});
  std::vector<DetectionBox> detect(const data::Frame& frame, int64_t frame_id) override;
  const ToyDetectorParams& params() const { return params_; }

 private:
  ToyDetectorParams params_;
};

// Replays detections from a CSV file keyed by frame id. Columns:
// frame_id,class,x_min,y_min,x_max,y_max,confidence. A lookup for an id the
// file does not contain throws MissingDataError naming the frame.
class ExternalFileDetector : public IDetector {
 public:
  explicit ExternalFileDetector(const std::filesystem::path& csv_path);
  std::vector<DetectionBox> detect(const data::Frame& frame, int64_t frame_id) override;

 private:
  std::filesystem::path path_;
  std::map<int64_t, std::vector<DetectionBox>> by_frame_;
};

// CSV round-trip helpers shared by the CLI and the external backend.
void write_detections_csv(const std::map<int64_t, std::vector<DetectionBox>>& detections,
                          const std::filesystem::path& path);
std::map<int64_t, std::vector<DetectionBox>> read_detections_csv(
    const std::filesystem::path& path);

}  // namespace framecast::det
