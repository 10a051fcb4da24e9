#include <cmath>
#include <map>
#include <stdexcept>

#include "core/rng.hpp"
#include "datakit/ops.hpp"

namespace framecast::data {

std::vector<SequenceSample> make_sequence_samples(const VideoClip& clip, int n_in, int n_out,
                                                  int stride) {
  if (n_in <= 0 || n_out <= 0)
    throw std::invalid_argument("make_sequence_samples: n_in and n_out must be positive");
  if (stride < 0) throw std::invalid_argument("make_sequence_samples: stride must be >= 0");
  if (stride == 0) stride = n_in + n_out;
  clip.validate();

  const int window = n_in + n_out;
  const int len = static_cast<int>(clip.frames.size());
  std::vector<SequenceSample> out;
  if (len < window) return out;
  const int count = (len - window) / stride + 1;
  out.reserve(static_cast<size_t>(count));
  for (int s = 0; s < count; ++s) {
    SequenceSample sample;
    sample.source_clip = clip.id;
    const int start = s * stride;
    sample.start_frame = start;
    sample.inputs.assign(clip.frames.begin() + start, clip.frames.begin() + start + n_in);
    sample.targets.assign(clip.frames.begin() + start + n_in,
                          clip.frames.begin() + start + window);
    out.push_back(std::move(sample));
  }
  return out;
}

DatasetSplit split_dataset(const std::vector<SequenceSample>& samples, double train_ratio,
                           uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("split_dataset: no samples");
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw std::invalid_argument("split_dataset: train_ratio must lie in (0,1)");

  // Group sample indices by clip, keeping first-appearance clip order as the
  // shuffle domain.
  std::vector<int> clip_order;
  std::map<int, std::vector<size_t>> by_clip;
  for (size_t i = 0; i < samples.size(); ++i) {
    const int c = samples[i].source_clip;
    auto [it, fresh] = by_clip.try_emplace(c);
    if (fresh) clip_order.push_back(c);
    it->second.push_back(i);
  }

  Rng rng = Rng::derived(seed, "split");
  rng.shuffle(clip_order);

  const size_t target =
      static_cast<size_t>(std::floor(train_ratio * static_cast<double>(samples.size())));
  std::vector<int> train_clips, skipped;
  size_t train_count = 0;
  for (int c : clip_order) {
    const size_t sz = by_clip[c].size();
    if (train_count + sz <= target) {
      train_clips.push_back(c);
      train_count += sz;
    } else {
      skipped.push_back(c);
    }
  }
  // Gap-fill pass: smaller skipped clips may still close the remainder.
  std::vector<int> test_clips;
  for (int c : skipped) {
    const size_t sz = by_clip[c].size();
    if (train_count + sz <= target) {
      train_clips.push_back(c);
      train_count += sz;
    } else {
      test_clips.push_back(c);
    }
  }

  DatasetSplit split;
  split.seed = seed;
  for (int c : train_clips)
    for (size_t i : by_clip[c]) split.train.push_back(samples[i]);
  for (int c : test_clips)
    for (size_t i : by_clip[c]) split.test.push_back(samples[i]);
  return split;
}

}  // namespace framecast::data
