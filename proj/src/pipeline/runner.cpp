#include "pipeline/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "datakit/clip_io.hpp"

namespace framecast::pipe {

const std::vector<std::string> kPipelineLabels = {"plain", "deblur_trconv", "deblur_upconv",
                                                  "sr"};

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_spec(const PipelineSpec& spec) {
  if (std::find(kPipelineLabels.begin(), kPipelineLabels.end(), spec.label) ==
      kPipelineLabels.end())
    throw ConfigError("unknown pipeline label '" + spec.label + "'");
  if (spec.predictor_ckpt.empty())
    throw ConfigError("pipeline '" + spec.label + "' needs a predictor checkpoint");
  const bool wants_enhancer = spec.label != "plain";
  if (wants_enhancer && spec.enhancer_ckpt.empty())
    throw ConfigError("pipeline '" + spec.label + "' needs an enhancer checkpoint");
  if (!wants_enhancer && !spec.enhancer_ckpt.empty())
    throw ConfigError("pipeline 'plain' does not take an enhancer checkpoint");
}

}  // namespace

std::string pipeline_label(const enh::EnhancerConfig& cfg) {
  if (cfg.task == enh::Task::super_resolve) return "sr";
  return cfg.upsampler == enh::UpsamplerKind::transposed_conv ? "deblur_trconv"
                                                              : "deblur_upconv";
}

int LoadedPipeline::output_resolution() const {
  int res = predictor.resolution();
  if (enhancer) res *= enhancer->cfg.scale_factor();
  return res;
}

LoadedPipeline load_pipeline(const PipelineSpec& spec) {
  check_spec(spec);
  LoadedPipeline p{spec, pred::load_predictor(spec.predictor_ckpt), std::nullopt};
  if (!spec.enhancer_ckpt.empty()) {
    p.enhancer = enh::load_enhancer(spec.enhancer_ckpt);
    const std::string actual = pipeline_label(p.enhancer->cfg);
    if (actual != spec.label)
      throw ConfigError("pipeline label '" + spec.label + "' does not match the enhancer " +
                        "checkpoint, which holds a '" + actual + "' model");
  }
  return p;
}

std::vector<data::Frame> run_window(LoadedPipeline& p, const std::vector<data::Frame>& inputs) {
  std::vector<data::Frame> frames = p.predictor.predict(inputs);
  if (p.enhancer) frames = p.enhancer->enhance(frames);
  return frames;
}

PipelineRun run_pipeline(LoadedPipeline& p, const DatasetIndex& idx, int limit) {
  if (p.predictor.resolution() != idx.data.base_resolution)
    throw ConfigError("predictor works at " + std::to_string(p.predictor.resolution()) +
                      "x but the dataset base resolution is " +
                      std::to_string(idx.data.base_resolution));
  const int out_res = p.output_resolution();
  if (out_res != idx.data.base_resolution && out_res != idx.data.canvas)
    throw ConfigError("pipeline output resolution " + std::to_string(out_res) +
                      " matches neither the dataset base resolution nor its canvas");

  std::vector<WindowRef> refs = idx.test;
  if (limit > 0 && static_cast<int>(refs.size()) > limit) refs.resize(limit);
  if (refs.empty()) throw MissingDataError("dataset has no test windows");

  ClipCache cache(idx);
  const std::vector<data::SequenceSample> base_windows =
      materialize_windows(idx, cache, refs, idx.data.base_resolution);
  std::vector<data::SequenceSample> upscaled_windows;
  if (out_res != idx.data.base_resolution)
    upscaled_windows = materialize_windows(idx, cache, refs, out_res);

  PipelineRun run;
  run.label = p.spec.label;
  run.windows = refs;
  const Clock::time_point t0 = Clock::now();
  for (const data::SequenceSample& w : base_windows)
    run.predicted.push_back(run_window(p, w.inputs));
  run.seconds = seconds_since(t0);
  for (size_t i = 0; i < base_windows.size(); ++i) {
    run.real_base.push_back(base_windows[i].targets);
    run.reference.push_back(upscaled_windows.empty() ? base_windows[i].targets
                                                     : upscaled_windows[i].targets);
  }
  return run;
}

BenchResult benchmark_inference(LoadedPipeline& p, const std::vector<data::Frame>& inputs,
                                int trials) {
  if (trials < 1) throw ConfigError("benchmark needs at least one trial");
  run_window(p, inputs);  // warm-up, untimed
  std::vector<double> times(static_cast<size_t>(trials));
  for (double& t : times) {
    const Clock::time_point t0 = Clock::now();
    run_window(p, inputs);
    t = seconds_since(t0);
  }
  BenchResult r;
  r.trials = trials;
  for (double t : times) r.mean_seconds += t;
  r.mean_seconds /= trials;
  double var = 0.0;
  for (double t : times) var += (t - r.mean_seconds) * (t - r.mean_seconds);
  r.std_seconds = std::sqrt(var / trials);
  return r;
}

namespace {

std::string sample_pack_name(size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%06zu.fcpack", i);
  return buf;
}

}  // namespace

void save_predictions(const std::filesystem::path& dir, const PredictionSet& ps) {
  if (ps.windows.size() != ps.predicted.size())
    throw std::invalid_argument("save_predictions: window references and frames disagree");
  std::filesystem::create_directories(dir);
  nlohmann::json refs = nlohmann::json::array();
  for (const WindowRef& r : ps.windows) refs.push_back(nlohmann::json::array({r.clip, r.start}));
  nlohmann::json meta{
      {"format", "framecast_predictions"},
      {"version", 1},
      {"pipeline", ps.pipeline},
      {"resolution", ps.resolution},
      {"fps", ps.fps},
      {"dataset", ps.dataset},
      {"windows", refs},
      {"models", ps.models},
  };
  for (size_t i = 0; i < ps.predicted.size(); ++i) {
    data::VideoClip clip;
    clip.id = static_cast<int>(i);
    clip.fps = ps.fps;
    clip.frames = ps.predicted[i];
    data::save_clip_pack(clip, dir / sample_pack_name(i));
  }
  std::ofstream out(dir / "predictions.json");
  out << meta.dump(2) << "\n";
  if (!out) throw IoError("cannot write " + (dir / "predictions.json").string());
}

PredictionSet load_predictions(const std::filesystem::path& dir) {
  const std::filesystem::path file = dir / "predictions.json";
  std::ifstream in(file);
  if (!in) throw MissingDataError("no prediction set at " + dir.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("prediction index " + file.string() + ": " + e.what());
  }
  if (meta.value("format", "") != "framecast_predictions")
    throw IoError("prediction index " + file.string() + " has an unknown format tag");

  PredictionSet ps;
  ps.pipeline = meta.at("pipeline").get<std::string>();
  ps.resolution = meta.at("resolution").get<int>();
  ps.fps = meta.at("fps").get<double>();
  ps.dataset = meta.at("dataset").get<std::string>();
  for (const nlohmann::json& e : meta.at("windows"))
    ps.windows.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
  ps.models = meta.at("models").get<std::map<std::string, std::string>>();
  for (size_t i = 0; i < ps.windows.size(); ++i)
    ps.predicted.push_back(data::load_clip_pack(dir / sample_pack_name(i)).frames);
  return ps;
}

}  // namespace framecast::pipe
