#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "datakit/frame.hpp"

namespace framecast::data {

// ===== synthetic scenes =====

enum class EdgeRule { bounce, wrap };
enum class ShapeKind { square, circle };

struct ShapeSpec {
  ShapeKind kind = ShapeKind::square;
  double size = 8.0;  // square edge length or circle diameter, pixels
  double x = 0.0, y = 0.0;  // centre at frame 0
  double vx = 0.0, vy = 0.0;  // pixels per frame
  std::array<float, 3> color = {1.0f, 1.0f, 1.0f};
};

struct ShapesConfig {
  int canvas = 32;
  int channels = 3;
  int frame_count = 30;
  double fps = 17.0;
  int shape_count = 2;          // used when shapes is empty
  double min_speed = 0.5;       // per-axis speed range for randomized shapes
  double max_speed = 2.0;
  double min_size = 7.0;
  double max_size = 11.0;
  EdgeRule edge_rule = EdgeRule::bounce;
  double blur_sigma = 0.0;      // optional degradation applied per frame
  std::vector<ShapeSpec> shapes;  // explicit cast; randomized when empty
  uint64_t seed = 0;
  int clip_id = 0;
};

// Renders bright antialiased shapes moving over a black canvas. Identical
// configs produce identical clips.
VideoClip synth_moving_shapes(const ShapesConfig& cfg);

// ===== degradations and resampling =====

// Separable Gaussian blur with replicated borders; sigma 0 is the identity.
Frame gaussian_blur(const Frame& f, double sigma);

// Catmull-Rom bicubic, centre-aligned, channel-wise, output clamped to
// [0, 1]. Matching source and target dims reproduce the input.
Frame bicubic_resize(const Frame& f, int target_h, int target_w);

// ===== windowing and splits =====

// Cuts consecutive (n_in inputs, n_out targets) windows starting every
// stride frames. A stride of zero selects the non-overlapping default
// n_in + n_out. Window count: floor((len - (n_in+n_out)) / stride) + 1,
// or zero when the clip is shorter than one window.
std::vector<SequenceSample> make_sequence_samples(const VideoClip& clip, int n_in, int n_out,
                                                  int stride = 0);

// Clip-disjoint deterministic split. Shuffles clips with the seed, then
// greedily fills the training side toward ratio * total samples; a second
// pass over the skipped clips closes any remaining gap. Every sample lands
// on exactly one side and clips are never straddled.
DatasetSplit split_dataset(const std::vector<SequenceSample>& samples, double train_ratio,
                           uint64_t seed);

}  // namespace framecast::data
