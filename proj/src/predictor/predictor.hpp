#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "datakit/frame.hpp"
#include "losses/loss_config.hpp"
#include "nn/adam.hpp"
#include "nn/layers.hpp"

namespace framecast::pred {

// Progressively grown video prediction GAN. The generator is a 3D
// encoder-decoder: frames enter at the current stage resolution, are pooled
// down a resolution ladder to a 4x4 core and decoded back up, with 1x1x1
// from/to-RGB adapters at every rung. The critic mirrors the encoder and
// scores the conditioning frames concatenated with real or predicted
// continuations. Training starts at 4x4 and doubles resolution stage by
// stage, blending each new rung in with a fade coefficient.

struct PredictorConfig {
  int n_in = 5;   // conditioning frames
  int n_out = 5;  // predicted frames
  int final_resolution = 32;
  int base_channels = 32;  // feature width at the 4x4 core
  int min_channels = 8;    // floor for high-resolution rungs
  bool pixel_norm = true;  // feature normalization inside the generator
  uint64_t seed = 1;

  double lr = 1e-3;    // ADAM, linearly decayed to zero across the run
  double beta1 = 0.0;
  int batch_size = 4;

  std::vector<int> ladder() const;  // 4, 8, ..., final_resolution
  int channels_at(int res) const;
  void validate() const;
};

struct ProgressiveSchedule {
  int epochs_per_stage = 8;
  double fade_fraction = 0.5;  // share of each stage's epochs spent fading in
  double alpha = 1.0;          // initial blend when resuming a faded stage

  void validate() const;
};

class PredictorState {
 public:
  // Builds generator and critic up to the given stage (0-based ladder
  // index) with name-seeded deterministic weights.
  static PredictorState build(const PredictorConfig& cfg, int stage);

  // Creates any blocks the target stage needs while keeping existing
  // weights; the new rung starts at its seeded initialization.
  void grow_to_stage(int stage);

  // Inference for one window of n_in frames at the current stage
  // resolution. Mid-fade states blend exactly like training does.
  std::vector<data::Frame> predict(const std::vector<data::Frame>& inputs);

  // Output-level fade: (1-alpha) * upsample(previous-stage prediction)
  // + alpha * current-stage prediction, linear in alpha by construction.
  // Requires stage >= 1 and alpha in [0, 1].
  nn::Tensor forward_blended(const nn::Tensor& x, double alpha);

  // ===== plumbing shared by training, checkpointing and tests =====

  // Generator pass at a stage; input (N, 3, n_in, res, res), output
  // (N, 3, n_out, res, res).
  nn::Tensor g_forward(const nn::Tensor& x, int stage);
  nn::Tensor g_backward(const nn::Tensor& dy, int stage, bool accumulate);

  // Critic pass at a stage; input (N, 3, n_in + n_out, res, res).
  std::vector<double> d_forward(const nn::Tensor& x, int stage);
  nn::Tensor d_backward(const std::vector<double>& dscore, int stage, bool accumulate);

  std::vector<nn::Param*> g_params(bool include_previous_stage);
  std::vector<nn::Param*> d_params(bool include_previous_stage);
  std::vector<nn::Param*> all_params();

  std::vector<nn::LayerInfo> describe_g() const;

  int resolution() const { return cfg.ladder()[static_cast<size_t>(stage)]; }

  PredictorConfig cfg;
  int stage = 0;
  double alpha = 1.0;
  int epochs_done = 0;

  nn::Adam opt_g{0.0};
  nn::Adam opt_d{0.0};

 private:
  // Ordered generator chain for a stage: from_rgb, enc blocks down to 8,
  // core, dec blocks up from 8, to_rgb.
  std::vector<nn::Module*> g_chain(int stage);
  std::vector<nn::Module*> d_chain(int stage);

  std::map<int, nn::ModulePtr> g_from_rgb_, g_enc_, g_dec_, g_to_rgb_;
  nn::ModulePtr g_core_;
  std::map<int, nn::ModulePtr> d_from_rgb_, d_block_;
  nn::ModulePtr d_head_;
};

// ===== persistence =====

void save_predictor(PredictorState& state, const std::filesystem::path& path);
PredictorState load_predictor(const std::filesystem::path& path);

// ===== training =====

struct TrainIO {
  std::filesystem::path out_dir;  // checkpoints and the loss log
};

// Progressive WGAN-GP training from the state's current stage through the
// final ladder rung. Writes one checkpoint per completed stage plus
// final.fckpt, and appends per-epoch rows to train_predictor_log.csv.
// Throws NumericalError (after writing a diagnostic checkpoint) if a loss
// goes non-finite.
void train_predictor(PredictorState& state, const data::DatasetSplit& split,
                     const ProgressiveSchedule& schedule, const losses::LossConfig& loss_cfg,
                     const TrainIO& io);

}  // namespace framecast::pred
