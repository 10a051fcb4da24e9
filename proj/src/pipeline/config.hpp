#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "datakit/ops.hpp"
#include "deteval/detector.hpp"
#include "enhancer/enhancer.hpp"
#include "losses/loss_config.hpp"
#include "predictor/predictor.hpp"

namespace framecast::pipe {

// Every run is driven by one JSON document: baked-in defaults, an optional
// config file merged over them, then --set key.path=value overrides on top.
// Unknown keys are rejected at every layer so typos fail fast instead of
// silently training with defaults.

nlohmann::json default_config();

// Parses the file and merges it over the defaults. Keys the default
// document does not know raise ConfigError.
nlohmann::json load_config(const std::filesystem::path& path);

// Applies one "section.key=value" assignment in place. The key path must
// already exist and must name a leaf; the value parses as JSON with a
// plain-string fallback and has to keep the kind of the value it replaces.
void apply_override(nlohmann::json& doc, const std::string& assignment);

nlohmann::json resolve_config(const std::optional<std::filesystem::path>& file,
                              const std::vector<std::string>& overrides);

// ===== typed views over the merged document =====

// Dataset geometry. Clips are synthesized sharp at canvas resolution;
// speeds and sizes are canvas pixels. base_resolution is what the
// predictor consumes and must divide canvas by the super-resolution
// factor.
struct DataConfig {
  int clip_count = 12;
  int frames_per_clip = 40;
  int canvas = 128;
  int base_resolution = 32;
  double fps = 17.0;
  int shape_count = 2;
  double min_speed = 2.0;
  double max_speed = 8.0;
  double min_size = 28.0;
  double max_size = 44.0;
  data::EdgeRule edge_rule = data::EdgeRule::bounce;
  double blur_sigma = 1.2;
  int n_in = 5;
  int n_out = 5;
  int window_stride = 0;
  double train_ratio = 0.75;

  int sr_factor() const { return canvas / base_resolution; }
  void validate() const;
};

DataConfig data_config(const nlohmann::json& doc);

// Canvas-resolution synthesis settings. The caller fills seed and clip_id;
// clips are stored undegraded, blur enters later when training pairs are
// derived.
data::ShapesConfig shapes_config(const nlohmann::json& doc);

pred::PredictorConfig predictor_config(const nlohmann::json& doc);
pred::ProgressiveSchedule predictor_schedule(const nlohmann::json& doc);

// Task and upsampler come from the command line, not the document. The
// upsampler only matters for the deblur tail and is normalized for
// super-resolution so the derived seed does not depend on an unused flag.
enh::EnhancerConfig enhancer_config(const nlohmann::json& doc, enh::Task task,
                                    enh::UpsamplerKind upsampler);
int enhancer_epochs(const nlohmann::json& doc);

losses::LossConfig loss_config(const nlohmann::json& doc);

struct EvalConfig {
  double iou_threshold = 0.5;
  bool eleven_point = true;
  det::ToyDetectorParams detector;
};

EvalConfig eval_config(const nlohmann::json& doc);

}  // namespace framecast::pipe
