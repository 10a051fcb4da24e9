#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "core/errors.hpp"
#include "core/hash.hpp"
#include "core/rng.hpp"
#include "enhancer/enhancer.hpp"
#include "kern/kernels.hpp"
#include "losses/adversarial.hpp"
#include "nn/bridge.hpp"

namespace framecast::enh {

namespace {

using nn::Tensor;

class PatchCritic : public losses::ITrainableCritic {
 public:
  explicit PatchCritic(EnhancerState& st) : st_(st) {}

  std::vector<double> score(const Tensor& x) override { return st_.d_forward(x); }

  std::vector<double> pass(const Tensor& x, const std::vector<double>& dscore,
                           bool accumulate_param_grads, Tensor* dx_out) override {
    std::vector<double> scores = st_.d_forward(x);
    Tensor dx = st_.d_backward(dscore, accumulate_param_grads);
    if (dx_out) *dx_out = std::move(dx);
    return scores;
  }

 private:
  EnhancerState& st_;
};

void zero_grads(const std::vector<nn::Param*>& params) {
  for (nn::Param* p : params) std::fill(p->grad.v.begin(), p->grad.v.end(), 0.0f);
}

// Constant for the first half of the run, then linear decay toward zero.
double lr_at(const EnhancerConfig& c, int epoch, int total) {
  const int half = total / 2;
  if (epoch < half || total <= half) return c.lr;
  return c.lr * (1.0 - static_cast<double>(epoch - half) / static_cast<double>(total - half));
}

double critic_step(EnhancerState& st, const Tensor& x, const Tensor& y,
                   const losses::LossConfig& lc, double lr, uint64_t mix_seed) {
  Tensor fake = st.g_forward(x);
  std::vector<nn::Param*> params = st.d_params();
  zero_grads(params);
  PatchCritic critic(st);
  const double d_loss = losses::wgan_critic_grads(critic, y, fake, lc.gp_weight, mix_seed);
  st.opt_d.step(params, lr);
  return d_loss;
}

struct GenStepResult {
  double total, adv, content;
};

GenStepResult generator_step(EnhancerState& st, const Tensor& x, const Tensor& y,
                             losses::FeatureExtractor& fx, const losses::LossConfig& lc,
                             double adv_weight, double lr) {
  std::vector<nn::Param*> params = st.g_params();
  zero_grads(params);
  const int n = x.shape[0];
  Tensor fake = st.g_forward(x);

  double adv = 0.0;
  Tensor dfake = Tensor::zeros(fake.shape);
  if (adv_weight > 0.0) {
    PatchCritic critic(st);
    std::vector<double> scores = critic.pass(
        fake, std::vector<double>(static_cast<size_t>(n), -adv_weight / n), false, &dfake);
    adv = losses::wgan_g_loss(scores);
  }
  double content = 0.0;
  if (lc.lambda > 0.0) {
    Tensor dgen;
    content = losses::content_loss_batch(fx, y, fake, &dgen);
    kern::axpy(static_cast<float>(lc.lambda), dgen.data(), dfake.data(), dfake.v.size());
  }

  st.g_backward(dfake, true);
  st.opt_g.step(params, lr);
  return {losses::combined_loss(adv, content, lc.lambda), adv, content};
}

}  // namespace

void train_enhancer(EnhancerState& state, const std::vector<EnhancerSample>& samples, int epochs,
                    const losses::LossConfig& loss_cfg, const TrainIO& io) {
  loss_cfg.validate();
  if (loss_cfg.kind != losses::AdvKind::wasserstein_gp)
    throw ConfigError("the enhancement trainer supports the wasserstein_gp objective only");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (samples.empty()) throw MissingDataError("no training pairs");
  const int sf = state.cfg.scale_factor();
  for (const auto& s : samples) {
    s.input.validate();
    s.target.validate();
    if (s.input.channels != 3 || s.target.channels != 3)
      throw ConfigError("training pairs must be RGB");
    if (s.target.height != sf * s.input.height || s.target.width != sf * s.input.width)
      throw ConfigError("target size must be scale_factor times the input size");
  }

  std::filesystem::create_directories(io.out_dir);
  losses::FeatureExtractor fx = losses::FeatureExtractor::make(loss_cfg.extractor);

  std::ofstream log(io.out_dir / "train_enhancer_log.csv", std::ios::app);
  if (!log) throw IoError("cannot open the training log in " + io.out_dir.string());
  if (log.tellp() == 0)
    log << "epoch,task,upsampler,adv_weight,d_loss,g_loss,adv,content,lr,seconds\n";

  const int batch = state.cfg.batch_size;
  for (int e = 0; e < epochs; ++e) {
    const auto t0 = std::chrono::steady_clock::now();
    const double lr = lr_at(state.cfg, e, epochs);
    const double adv_weight = e < state.cfg.warmup_epochs ? 0.0 : 1.0;

    Rng rng = Rng::derived(state.cfg.seed, "epoch_" + std::to_string(state.epochs_done));
    std::vector<size_t> order(samples.size());
    std::iota(order.begin(), order.end(), size_t{0});
    rng.shuffle(order);

    double d_sum = 0.0, g_sum = 0.0, adv_sum = 0.0, c_sum = 0.0;
    int steps = 0;
    for (size_t b0 = 0; b0 < order.size(); b0 += static_cast<size_t>(batch)) {
      const size_t b1 = std::min(order.size(), b0 + static_cast<size_t>(batch));
      std::vector<data::Frame> ins, tgts;
      for (size_t i = b0; i < b1; ++i) {
        ins.push_back(samples[order[i]].input);
        tgts.push_back(samples[order[i]].target);
      }
      Tensor x = nn::image_batch(ins);
      Tensor y = nn::image_batch(tgts);

      double d_loss = 0.0;
      if (adv_weight > 0.0) {
        const uint64_t mix_seed = combine_seed(
            state.cfg.seed,
            "mix_" + std::to_string(state.epochs_done) + "_" + std::to_string(b0));
        d_loss = critic_step(state, x, y, loss_cfg, lr, mix_seed);
      }
      const GenStepResult g = generator_step(state, x, y, fx, loss_cfg, adv_weight, lr);

      if (!std::isfinite(d_loss) || !std::isfinite(g.total)) {
        save_enhancer(state, io.out_dir / "diagnostic.fckpt");
        throw NumericalError("non-finite loss at epoch " + std::to_string(state.epochs_done) +
                             "; diagnostic checkpoint written");
      }
      d_sum += d_loss;
      g_sum += g.total;
      adv_sum += g.adv;
      c_sum += g.content;
      ++steps;
    }

    state.epochs_done += 1;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double denom = steps > 0 ? steps : 1;
    log << state.epochs_done << "," << to_string(state.cfg.task) << ","
        << to_string(state.cfg.upsampler) << "," << adv_weight << "," << d_sum / denom << ","
        << g_sum / denom << "," << adv_sum / denom << "," << c_sum / denom << "," << lr << ","
        << secs << "\n"
        << std::flush;
  }

  if (epochs > 0) save_enhancer(state, io.out_dir / "final.fckpt");
}

}  // namespace framecast::enh
