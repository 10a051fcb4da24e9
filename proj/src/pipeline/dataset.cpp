#include "pipeline/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "core/errors.hpp"
#include "core/hash.hpp"
#include "datakit/ops.hpp"

namespace framecast::pipe {

namespace {

using nlohmann::json;

std::string clip_dir_name(int id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clip_%06d", id);
  return std::string("clips/") + buf;
}

std::vector<int> window_starts(const DataConfig& d) {
  const int window = d.n_in + d.n_out;
  const int stride = d.window_stride == 0 ? window : d.window_stride;
  std::vector<int> starts;
  if (d.frames_per_clip < window) return starts;
  const int count = (d.frames_per_clip - window) / stride + 1;
  for (int s = 0; s < count; ++s) starts.push_back(s * stride);
  return starts;
}

json refs_json(const std::vector<WindowRef>& refs) {
  json a = json::array();
  for (const WindowRef& r : refs) a.push_back(json::array({r.clip, r.start}));
  return a;
}

std::vector<WindowRef> refs_from_json(const json& a) {
  std::vector<WindowRef> refs;
  for (const json& e : a) refs.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
  return refs;
}

data::Frame at_resolution(const data::Frame& f, int resolution) {
  if (f.height == resolution && f.width == resolution) return f;
  return data::bicubic_resize(f, resolution, resolution);
}

// Unique (clip, frame) pairs covered by the training windows, sorted.
std::vector<std::pair<int, int>> train_frame_refs(const DatasetIndex& idx) {
  std::set<std::pair<int, int>> seen;
  const int window = idx.data.n_in + idx.data.n_out;
  for (const WindowRef& r : idx.train)
    for (int f = r.start; f < r.start + window; ++f) seen.insert({r.clip, f});
  return {seen.begin(), seen.end()};
}

}  // namespace

DatasetIndex make_dataset(const std::filesystem::path& root, const nlohmann::json& doc) {
  const DataConfig d = data_config(doc);
  const data::ShapesConfig base = shapes_config(doc);
  const uint64_t seed = doc.at("seed").get<uint64_t>();
  const uint64_t clip_seed_root = combine_seed(seed, "data");

  std::filesystem::create_directories(root / "clips");

  DatasetIndex idx;
  idx.root = root;
  idx.seed = seed;
  idx.data = d;

  // The split decision only needs clip membership, so the windows passed to
  // the splitter carry references instead of frames.
  const std::vector<int> starts = window_starts(d);
  if (starts.empty()) throw ConfigError("dataset: clips are too short for a single window");
  std::vector<data::SequenceSample> windows;
  for (int i = 0; i < d.clip_count; ++i) {
    data::ShapesConfig cfg = base;
    cfg.clip_id = i;
    cfg.seed = combine_seed(clip_seed_root, static_cast<uint64_t>(i));
    const data::VideoClip clip = data::synth_moving_shapes(cfg);
    idx.clip_dirs.push_back(clip_dir_name(i));
    data::save_clip_dir(clip, root / idx.clip_dirs.back());
    for (int s : starts) {
      data::SequenceSample w;
      w.source_clip = i;
      w.start_frame = s;
      windows.push_back(std::move(w));
    }
  }

  const data::DatasetSplit split =
      data::split_dataset(windows, d.train_ratio, combine_seed(seed, "split"));
  for (const data::SequenceSample& s : split.train) idx.train.push_back({s.source_clip, s.start_frame});
  for (const data::SequenceSample& s : split.test) idx.test.push_back({s.source_clip, s.start_frame});

  json meta{
      {"format", "framecast_dataset"},
      {"version", 1},
      {"seed", seed},
      {"data", doc.at("data")},
      {"clips", idx.clip_dirs},
      {"train", refs_json(idx.train)},
      {"test", refs_json(idx.test)},
  };
  std::ofstream out(root / "dataset.json");
  out << meta.dump(2) << "\n";
  if (!out) throw IoError("cannot write " + (root / "dataset.json").string());
  return idx;
}

DatasetIndex load_dataset_index(const std::filesystem::path& root) {
  const std::filesystem::path file = root / "dataset.json";
  std::ifstream in(file);
  if (!in) throw MissingDataError("no dataset at " + root.string() + " (missing dataset.json)");
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("dataset index " + file.string() + ": " + e.what());
  }
  if (meta.value("format", "") != "framecast_dataset")
    throw IoError("dataset index " + file.string() + " has an unknown format tag");

  DatasetIndex idx;
  idx.root = root;
  idx.seed = meta.at("seed").get<uint64_t>();
  idx.data = data_config(json{{"data", meta.at("data")}});
  idx.clip_dirs = meta.at("clips").get<std::vector<std::string>>();
  idx.train = refs_from_json(meta.at("train"));
  idx.test = refs_from_json(meta.at("test"));
  return idx;
}

const data::VideoClip& ClipCache::clip(int id) {
  auto it = loaded_.find(id);
  if (it != loaded_.end()) return it->second;
  if (id < 0 || id >= static_cast<int>(idx_.clip_dirs.size()))
    throw MissingDataError("dataset has no clip " + std::to_string(id));
  data::VideoClip c = data::load_clip_dir(idx_.root / idx_.clip_dirs[id]);
  return loaded_.emplace(id, std::move(c)).first->second;
}

std::vector<data::SequenceSample> materialize_windows(const DatasetIndex& idx, ClipCache& cache,
                                                      const std::vector<WindowRef>& refs,
                                                      int resolution) {
  if (resolution < 4 || resolution > idx.data.canvas)
    throw ConfigError("window resolution must lie in [4, canvas]");
  std::vector<data::SequenceSample> out;
  out.reserve(refs.size());
  for (const WindowRef& r : refs) {
    const data::VideoClip& clip = cache.clip(r.clip);
    const int window = idx.data.n_in + idx.data.n_out;
    if (r.start < 0 || r.start + window > static_cast<int>(clip.frames.size()))
      throw MissingDataError("window reference past the end of clip " + std::to_string(r.clip));
    data::SequenceSample s;
    s.source_clip = r.clip;
    s.start_frame = r.start;
    for (int f = 0; f < idx.data.n_in; ++f)
      s.inputs.push_back(at_resolution(clip.frames[r.start + f], resolution));
    for (int f = 0; f < idx.data.n_out; ++f)
      s.targets.push_back(at_resolution(clip.frames[r.start + idx.data.n_in + f], resolution));
    out.push_back(std::move(s));
  }
  return out;
}

data::DatasetSplit load_split(const DatasetIndex& idx, int resolution) {
  ClipCache cache(idx);
  data::DatasetSplit split;
  split.seed = combine_seed(idx.seed, "split");
  split.train = materialize_windows(idx, cache, idx.train, resolution);
  split.test = materialize_windows(idx, cache, idx.test, resolution);
  return split;
}

std::vector<enh::EnhancerSample> deblur_pairs(const DatasetIndex& idx, int max_pairs) {
  std::vector<std::pair<int, int>> refs = train_frame_refs(idx);
  if (max_pairs > 0 && static_cast<int>(refs.size()) > max_pairs) refs.resize(max_pairs);
  ClipCache cache(idx);
  std::vector<enh::EnhancerSample> pairs;
  pairs.reserve(refs.size());
  for (const auto& [clip_id, frame] : refs) {
    enh::EnhancerSample p;
    p.target = at_resolution(cache.clip(clip_id).frames[frame], idx.data.base_resolution);
    p.input = data::gaussian_blur(p.target, idx.data.blur_sigma);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<enh::EnhancerSample> sr_pairs(const DatasetIndex& idx, int max_pairs) {
  std::vector<std::pair<int, int>> refs = train_frame_refs(idx);
  if (max_pairs > 0 && static_cast<int>(refs.size()) > max_pairs) refs.resize(max_pairs);
  ClipCache cache(idx);
  std::vector<enh::EnhancerSample> pairs;
  pairs.reserve(refs.size());
  for (const auto& [clip_id, frame] : refs) {
    enh::EnhancerSample p;
    p.target = cache.clip(clip_id).frames[frame];
    p.input = at_resolution(p.target, idx.data.base_resolution);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace framecast::pipe
