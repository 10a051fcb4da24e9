#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "datakit/frame.hpp"
#include "losses/loss_config.hpp"
#include "nn/adam.hpp"
#include "nn/layers.hpp"

namespace framecast::enh {

// Single-frame enhancement GANs that clean up the predictor's output. The
// deblur generator is a residual encoder-decoder: the network learns a
// correction that is added onto its input and clamped, so a fresh model is
// exactly the identity. Its upsampling tail comes in two interchangeable
// builds, strided transposed convolutions or nearest-neighbour upsampling
// followed by a convolution; the tails behave differently around
// checkerboard artifacts, which analysis.hpp quantifies. The 4x
// super-resolution generator is a residual trunk with two upsample-conv
// stages. Both train against a small patch critic under the same
// penalized Wasserstein objective as the predictor.

enum class Task { deblur, super_resolve };
enum class UpsamplerKind { transposed_conv, nn_upsample_then_conv };

Task task_from_string(const std::string& s);
std::string to_string(Task t);
UpsamplerKind upsampler_from_string(const std::string& s);
std::string to_string(UpsamplerKind k);

struct EnhancerConfig {
  Task task = Task::deblur;
  UpsamplerKind upsampler = UpsamplerKind::transposed_conv;  // deblur tail only
  int base_width = 16;  // generator feature width
  int res_blocks = 3;   // residual trunk depth
  uint64_t seed = 2;

  double lr = 1e-4;  // ADAM; halves into a linear decay at mid-training
  double beta1 = 0.5;
  int batch_size = 4;
  int warmup_epochs = 0;  // content-only epochs before the critic joins

  int scale_factor() const { return task == Task::super_resolve ? 4 : 1; }
  void validate() const;
};

// One supervised pair: a degraded input and the sharp reference it should
// be mapped to. For super-resolution the target is scale_factor times the
// input's size.
struct EnhancerSample {
  data::Frame input;
  data::Frame target;
};

class EnhancerState {
 public:
  static EnhancerState build(const EnhancerConfig& cfg);

  data::Frame enhance_one(const data::Frame& f);
  std::vector<data::Frame> enhance(const std::vector<data::Frame>& frames);

  // (N, 3, H, W) -> (N, 3, sH, sW)
  nn::Tensor g_forward(const nn::Tensor& x);
  nn::Tensor g_backward(const nn::Tensor& dy, bool accumulate);
  std::vector<double> d_forward(const nn::Tensor& x);
  nn::Tensor d_backward(const std::vector<double>& dscore, bool accumulate);

  std::vector<nn::Param*> g_params();
  std::vector<nn::Param*> d_params();
  std::vector<nn::Param*> all_params();
  std::vector<nn::LayerInfo> describe_g() const;

  EnhancerConfig cfg;
  int epochs_done = 0;
  nn::Adam opt_g{0.5};
  nn::Adam opt_d{0.5};

 private:
  nn::ModulePtr g_, d_;
};

void save_enhancer(EnhancerState& state, const std::filesystem::path& path);
EnhancerState load_enhancer(const std::filesystem::path& path);

struct TrainIO {
  std::filesystem::path out_dir;  // checkpoint and the loss log
};

// Adversarial fine-tuning on degraded/sharp pairs for the given number of
// epochs. Warm-up epochs run the content loss alone (the adversarial weight
// column in the log shows 0 there). Writes final.fckpt and appends to
// train_enhancer_log.csv. Throws NumericalError after saving a diagnostic
// checkpoint if a loss goes non-finite.
void train_enhancer(EnhancerState& state, const std::vector<EnhancerSample>& samples, int epochs,
                    const losses::LossConfig& loss_cfg, const TrainIO& io);

}  // namespace framecast::enh
