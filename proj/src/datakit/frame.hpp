#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace framecast::data {

// One video frame: planar channel-major float32 in [0, 1]. Channels are 1
// (gray) or 3 (RGB). Spatial dims of at least 4 keep every resampling and
// windowed metric well defined.
struct Frame {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> pixels;  // size channels*height*width, plane by plane

  static Frame zeros(int h, int w, int c);

  float at(int c, int y, int x) const {
    return pixels[(static_cast<size_t>(c) * height + y) * width + x];
  }
  float& at(int c, int y, int x) {
    return pixels[(static_cast<size_t>(c) * height + y) * width + x];
  }
  const float* plane(int c) const { return pixels.data() + static_cast<size_t>(c) * height * width; }
  float* plane(int c) { return pixels.data() + static_cast<size_t>(c) * height * width; }

  // Throws std::invalid_argument when any invariant is broken.
  void validate() const;
  bool same_dims(const Frame& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

// Rec. 601 luma; returns the single plane unchanged for gray frames.
std::vector<double> luma(const Frame& f);

// Frames plus timing metadata. All frames share dimensions.
struct VideoClip {
  int id = 0;
  double fps = 17.0;
  std::vector<Frame> frames;

  void validate() const;
};

// One training/evaluation window: n_in conditioning frames followed by n_out
// prediction targets, tagged with the clip and frame offset it was cut from
// so dataset splits can stay clip-disjoint and windows can be referenced on
// disk without copying frames.
struct SequenceSample {
  int source_clip = 0;
  int start_frame = 0;
  std::vector<Frame> inputs;
  std::vector<Frame> targets;
};

struct DatasetSplit {
  std::vector<SequenceSample> train;
  std::vector<SequenceSample> test;
  uint64_t seed = 0;
};

}  // namespace framecast::data
