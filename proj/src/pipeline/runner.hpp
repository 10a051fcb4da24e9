#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "datakit/frame.hpp"
#include "enhancer/enhancer.hpp"
#include "pipeline/dataset.hpp"
#include "predictor/predictor.hpp"

namespace framecast::pipe {

// A pipeline is the predictor optionally followed by one enhancement stage.
// The label names the variant and pins what the enhancer checkpoint must
// contain:
//
//   plain           predictor only
//   deblur_trconv   deblur generator with the transposed-convolution tail
//   deblur_upconv   deblur generator with the upsample-then-convolve tail
//   sr              4x super-resolution generator
//
// Loading cross-checks the label against the checkpoint so results can
// never be reported under the wrong name.

extern const std::vector<std::string> kPipelineLabels;

// The label an enhancer checkpoint belongs to.
std::string pipeline_label(const enh::EnhancerConfig& cfg);

struct PipelineSpec {
  std::string label;
  std::filesystem::path predictor_ckpt;
  std::filesystem::path enhancer_ckpt;  // empty exactly for "plain"
};

struct LoadedPipeline {
  PipelineSpec spec;
  pred::PredictorState predictor;
  std::optional<enh::EnhancerState> enhancer;

  int output_resolution() const;
};

LoadedPipeline load_pipeline(const PipelineSpec& spec);

// Runs one conditioning window through the full pipeline.
std::vector<data::Frame> run_window(LoadedPipeline& p, const std::vector<data::Frame>& inputs);

// Predictions and matched references over the test windows. reference
// frames share the pipeline's output resolution; real_base keeps the
// base-resolution targets that detection evaluation measures against.
struct PipelineRun {
  std::string label;
  std::vector<WindowRef> windows;                   // the test windows used
  std::vector<std::vector<data::Frame>> predicted;  // [window][step]
  std::vector<std::vector<data::Frame>> reference;
  std::vector<std::vector<data::Frame>> real_base;
  double seconds = 0.0;  // inference wall time, excluding data loading
};

// limit of zero runs every test window.
PipelineRun run_pipeline(LoadedPipeline& p, const DatasetIndex& idx, int limit = 0);

struct BenchResult {
  int trials = 0;
  double mean_seconds = 0.0;
  double std_seconds = 0.0;  // zero for a single trial
};

// Times run_window on a fixed input, one warm-up pass excluded.
BenchResult benchmark_inference(LoadedPipeline& p, const std::vector<data::Frame>& inputs,
                                int trials);

// ===== prediction sets on disk =====
//
// A directory of sample_000000.fcpack files (one float32 clip pack per test
// window, exact round-trip) plus predictions.json recording the pipeline
// label, the window references and the model hashes. Everything in it is
// deterministic, so two runs of the same models on the same dataset produce
// identical bytes.

struct PredictionSet {
  std::string pipeline;
  int resolution = 0;
  double fps = 0.0;
  std::string dataset;  // root the windows refer to
  std::vector<WindowRef> windows;
  std::map<std::string, std::string> models;  // role -> checkpoint hash
  std::vector<std::vector<data::Frame>> predicted;
};

void save_predictions(const std::filesystem::path& dir, const PredictionSet& ps);
PredictionSet load_predictions(const std::filesystem::path& dir);

}  // namespace framecast::pipe
