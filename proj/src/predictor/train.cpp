#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "core/errors.hpp"
#include "core/hash.hpp"
#include "core/rng.hpp"
#include "datakit/ops.hpp"
#include "kern/kernels.hpp"
#include "losses/adversarial.hpp"
#include "nn/bridge.hpp"
#include "predictor/predictor.hpp"

namespace framecast::pred {

namespace {

using nn::Tensor;

bool is_fading(const PredictorState& st, double alpha) { return st.stage > 0 && alpha < 1.0; }

std::vector<double> blend_scores(const std::vector<double>& prev, const std::vector<double>& cur,
                                 double alpha) {
  std::vector<double> out(cur.size());
  for (size_t i = 0; i < cur.size(); ++i) out[i] = (1.0 - alpha) * prev[i] + alpha * cur[i];
  return out;
}

std::vector<double> scaled(const std::vector<double>& v, double s) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
  return out;
}

// One full critic pass: scores for x and a backward sweep carrying the given
// per-sample score gradients. During a fade both critic paths run; each
// path's backward follows its own forward, so the shared blocks' activation
// caches are always the right ones.
std::vector<double> critic_pass(PredictorState& st, double alpha, const Tensor& x,
                                const std::vector<double>& dscore, bool accum_params,
                                Tensor* dx_out) {
  if (!is_fading(st, alpha)) {
    std::vector<double> scores = st.d_forward(x, st.stage);
    Tensor dx = st.d_backward(dscore, st.stage, accum_params);
    if (dx_out) *dx_out = std::move(dx);
    return scores;
  }
  Tensor down = nn::avgpool_spatial2(x);
  std::vector<double> prev = st.d_forward(down, st.stage - 1);
  Tensor dx_down = st.d_backward(scaled(dscore, 1.0 - alpha), st.stage - 1, accum_params);
  std::vector<double> cur = st.d_forward(x, st.stage);
  Tensor dx_cur = st.d_backward(scaled(dscore, alpha), st.stage, accum_params);
  if (dx_out) {
    Tensor dx_prev = nn::avgpool_spatial2_backward(dx_down, x.shape);
    kern::add(dx_prev.data(), dx_cur.data(), dx_cur.data(), dx_cur.v.size());
    *dx_out = std::move(dx_cur);
  }
  return blend_scores(prev, cur, alpha);
}

std::vector<double> critic_score_only(PredictorState& st, double alpha, const Tensor& x) {
  if (!is_fading(st, alpha)) return st.d_forward(x, st.stage);
  std::vector<double> prev = st.d_forward(nn::avgpool_spatial2(x), st.stage - 1);
  std::vector<double> cur = st.d_forward(x, st.stage);
  return blend_scores(prev, cur, alpha);
}

class BlendedCritic : public losses::ITrainableCritic {
 public:
  BlendedCritic(PredictorState& st, double alpha) : st_(st), alpha_(alpha) {}

  std::vector<double> score(const Tensor& x) override {
    return critic_score_only(st_, alpha_, x);
  }

  std::vector<double> pass(const Tensor& x, const std::vector<double>& dscore,
                           bool accumulate_param_grads, Tensor* dx_out) override {
    return critic_pass(st_, alpha_, x, dscore, accumulate_param_grads, dx_out);
  }

 private:
  PredictorState& st_;
  double alpha_;
};

void zero_grads(const std::vector<nn::Param*>& params) {
  for (nn::Param* p : params) std::fill(p->grad.v.begin(), p->grad.v.end(), 0.0f);
}

double critic_step(PredictorState& st, double alpha, const Tensor& x, const Tensor& y,
                   const losses::LossConfig& lc, double lr, uint64_t mix_seed) {
  Tensor fake_tail =
      is_fading(st, alpha) ? st.forward_blended(x, alpha) : st.g_forward(x, st.stage);
  Tensor real = nn::concat_time(x, y);
  Tensor fake = nn::concat_time(x, fake_tail);

  std::vector<nn::Param*> params = st.d_params(is_fading(st, alpha));
  zero_grads(params);
  BlendedCritic critic(st, alpha);
  const double d_loss = losses::wgan_critic_grads(critic, real, fake, lc.gp_weight, mix_seed);
  st.opt_d.step(params, lr);
  return d_loss;
}

struct GenStepResult {
  double total, adv, content;
};

GenStepResult generator_step(PredictorState& st, double alpha, const Tensor& x, const Tensor& y,
                             losses::FeatureExtractor& fx, const losses::LossConfig& lc,
                             double lr) {
  const bool fade = is_fading(st, alpha);
  const int n = x.shape[0];
  std::vector<nn::Param*> params = st.g_params(fade);
  zero_grads(params);

  Tensor down, fake_tail;
  if (fade) {
    down = nn::avgpool_spatial2(x);
    Tensor prev_up = nn::nn_upsample_spatial2(st.g_forward(down, st.stage - 1));
    fake_tail = st.g_forward(x, st.stage);
    kern::scale(static_cast<float>(alpha), fake_tail.data(), fake_tail.v.size());
    kern::axpy(static_cast<float>(1.0 - alpha), prev_up.data(), fake_tail.data(),
               fake_tail.v.size());
  } else {
    fake_tail = st.g_forward(x, st.stage);
  }
  Tensor fake = nn::concat_time(x, fake_tail);

  Tensor dfake_seq;
  std::vector<double> fake_scores = critic_pass(
      st, alpha, fake, std::vector<double>(static_cast<size_t>(n), -1.0 / n), false, &dfake_seq);
  const double adv = losses::wgan_g_loss(fake_scores);
  Tensor dtail = nn::slice_time(dfake_seq, st.cfg.n_in, st.cfg.n_in + st.cfg.n_out);

  double content = 0.0;
  if (lc.lambda > 0.0) {
    Tensor dgen_img;
    content = losses::content_loss_batch(fx, nn::video_flatten_frames(y),
                                         nn::video_flatten_frames(fake_tail), &dgen_img);
    Tensor dgen = nn::video_unflatten_frames(dgen_img, n, st.cfg.n_out);
    kern::axpy(static_cast<float>(lc.lambda), dgen.data(), dtail.data(), dtail.v.size());
  }

  if (fade) {
    Tensor dcur = dtail;
    kern::scale(static_cast<float>(alpha), dcur.data(), dcur.v.size());
    st.g_backward(dcur, st.stage, true);
    st.g_forward(down, st.stage - 1);  // restore the previous chain's caches
    kern::scale(static_cast<float>(1.0 - alpha), dtail.data(), dtail.v.size());
    st.g_backward(nn::nn_upsample_spatial2_backward(dtail), st.stage - 1, true);
  } else {
    st.g_backward(dtail, st.stage, true);
  }

  st.opt_g.step(params, lr);
  return {losses::combined_loss(adv, content, lc.lambda), adv, content};
}

data::Frame frame_at(const data::Frame& f, int res) {
  if (f.height == res && f.width == res) return f;
  return data::bicubic_resize(f, res, res);
}

}  // namespace

void train_predictor(PredictorState& state, const data::DatasetSplit& split,
                     const ProgressiveSchedule& schedule, const losses::LossConfig& loss_cfg,
                     const TrainIO& io) {
  schedule.validate();
  loss_cfg.validate();
  if (loss_cfg.kind != losses::AdvKind::wasserstein_gp)
    throw ConfigError("the progressive trainer supports the wasserstein_gp objective only");
  if (split.train.empty()) throw MissingDataError("training split is empty");
  for (const auto& s : split.train)
    if (static_cast<int>(s.inputs.size()) != state.cfg.n_in ||
        static_cast<int>(s.targets.size()) != state.cfg.n_out)
      throw ConfigError("sample window lengths do not match the model's n_in/n_out");

  std::filesystem::create_directories(io.out_dir);
  const std::vector<int> ladder = state.cfg.ladder();
  const int total_epochs =
      std::max(1, schedule.epochs_per_stage * static_cast<int>(ladder.size()));
  losses::FeatureExtractor fx = losses::FeatureExtractor::make(loss_cfg.extractor);

  std::ofstream log(io.out_dir / "train_predictor_log.csv", std::ios::app);
  if (!log) throw IoError("cannot open the training log in " + io.out_dir.string());
  if (log.tellp() == 0)
    log << "epoch,stage,resolution,alpha,d_loss,g_loss,adv,content,lr,seconds\n";

  const int batch = state.cfg.batch_size;
  for (int s = state.stage; s < static_cast<int>(ladder.size()); ++s) {
    state.grow_to_stage(s);
    const int res = ladder[static_cast<size_t>(s)];

    std::vector<std::vector<data::Frame>> ins(split.train.size()), tgts(split.train.size());
    for (size_t i = 0; i < split.train.size(); ++i) {
      for (const auto& f : split.train[i].inputs) ins[i].push_back(frame_at(f, res));
      for (const auto& f : split.train[i].targets) tgts[i].push_back(frame_at(f, res));
    }

    const int fade_epochs =
        s == 0 ? 0
               : std::max(1, static_cast<int>(std::lround(schedule.fade_fraction *
                                                          schedule.epochs_per_stage)));
    for (int e = 0; e < schedule.epochs_per_stage; ++e) {
      const auto t0 = std::chrono::steady_clock::now();
      const double alpha = s == 0 ? 1.0 : std::min(1.0, (e + 1.0) / fade_epochs);
      state.alpha = alpha;
      const double lr =
          state.cfg.lr *
          std::max(0.01, 1.0 - static_cast<double>(state.epochs_done) / total_epochs);

      Rng rng = Rng::derived(state.cfg.seed, "epoch_" + std::to_string(state.epochs_done));
      std::vector<size_t> order(ins.size());
      std::iota(order.begin(), order.end(), size_t{0});
      rng.shuffle(order);

      double d_sum = 0.0, g_sum = 0.0, adv_sum = 0.0, c_sum = 0.0;
      int steps = 0;
      for (size_t b0 = 0; b0 < order.size(); b0 += static_cast<size_t>(batch)) {
        const size_t b1 = std::min(order.size(), b0 + static_cast<size_t>(batch));
        std::vector<std::vector<data::Frame>> bx, by;
        for (size_t i = b0; i < b1; ++i) {
          bx.push_back(ins[order[i]]);
          by.push_back(tgts[order[i]]);
        }
        Tensor x = nn::video_batch(bx);
        Tensor y = nn::video_batch(by);
        const uint64_t mix_seed = combine_seed(
            state.cfg.seed, "mix_" + std::to_string(state.epochs_done) + "_" + std::to_string(b0));

        const double d_loss = critic_step(state, alpha, x, y, loss_cfg, lr, mix_seed);
        const GenStepResult g = generator_step(state, alpha, x, y, fx, loss_cfg, lr);

        if (!std::isfinite(d_loss) || !std::isfinite(g.total)) {
          save_predictor(state, io.out_dir / "diagnostic.fckpt");
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
      log << state.epochs_done << "," << s << "," << res << "," << alpha << "," << d_sum / denom
          << "," << g_sum / denom << "," << adv_sum / denom << "," << c_sum / denom << "," << lr
          << "," << secs << "\n"
          << std::flush;
    }

    state.alpha = 1.0;
    save_predictor(state, io.out_dir / ("stage_" + std::to_string(res) + ".fckpt"));
  }
  save_predictor(state, io.out_dir / "final.fckpt");
}

}  // namespace framecast::pred
