#pragma once

#include <filesystem>
#include <map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "datakit/clip_io.hpp"
#include "datakit/frame.hpp"
#include "enhancer/enhancer.hpp"
#include "pipeline/config.hpp"

namespace framecast::pipe {

// On-disk dataset layout under one root directory:
//
//   dataset.json            index: geometry, clip list, split references
//   clips/clip_000000/      sharp canvas-resolution frames, one dir per clip
//
// Clips are stored once, undegraded. Everything a consumer needs at another
// resolution or degradation level is derived deterministically on load, so
// the base-resolution windows, blurred deblur inputs and low-resolution
// super-resolution inputs all trace back to the same stored pixels. The
// split is kept as (clip, start frame) references, which pins the exact
// train/test membership without duplicating frames.

struct WindowRef {
  int clip = 0;
  int start = 0;
};

struct DatasetIndex {
  std::filesystem::path root;
  uint64_t seed = 0;
  DataConfig data;
  std::vector<std::string> clip_dirs;  // relative to root, indexed by clip id
  std::vector<WindowRef> train;
  std::vector<WindowRef> test;
};

// Synthesizes the clips, writes them under root and splits the windows
// clip-disjointly. Returns the index it wrote to dataset.json.
DatasetIndex make_dataset(const std::filesystem::path& root, const nlohmann::json& doc);

DatasetIndex load_dataset_index(const std::filesystem::path& root);

// Loads clips lazily and keeps them; one cache per pass over a dataset.
class ClipCache {
 public:
  explicit ClipCache(const DatasetIndex& idx) : idx_(idx) {}
  const data::VideoClip& clip(int id);

 private:
  const DatasetIndex& idx_;
  std::map<int, data::VideoClip> loaded_;
};

// Cuts the referenced windows out of their clips at the requested
// resolution (canvas resolution passes frames through unchanged, anything
// smaller is a bicubic downscale).
std::vector<data::SequenceSample> materialize_windows(const DatasetIndex& idx, ClipCache& cache,
                                                      const std::vector<WindowRef>& refs,
                                                      int resolution);

// Materializes the whole split at one resolution.
data::DatasetSplit load_split(const DatasetIndex& idx, int resolution);

// Supervised enhancement pairs from the unique frames of the training
// windows, ordered by (clip, frame). max_pairs of zero keeps them all.
//
// deblur: base-resolution sharp target, Gaussian-blurred input.
// super-resolution: canvas-resolution target, 4x-downscaled input.
std::vector<enh::EnhancerSample> deblur_pairs(const DatasetIndex& idx, int max_pairs = 0);
std::vector<enh::EnhancerSample> sr_pairs(const DatasetIndex& idx, int max_pairs = 0);

}  // namespace framecast::pipe
