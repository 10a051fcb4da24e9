#include "predictor/predictor.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "core/errors.hpp"
#include "kern/kernels.hpp"
#include "nn/bridge.hpp"
#include "nn/checkpoint.hpp"

namespace framecast::pred {

using nn::Module;
using nn::ModulePtr;
using nn::Tensor;

std::vector<int> PredictorConfig::ladder() const {
  std::vector<int> rungs;
  for (int r = 4; r <= final_resolution; r *= 2) rungs.push_back(r);
  return rungs;
}

int PredictorConfig::channels_at(int res) const {
  return std::max(min_channels, base_channels * 4 / res);
}

void PredictorConfig::validate() const {
  if (n_in <= 0 || n_out <= 0) throw ConfigError("frame counts must be positive");
  if (n_in != n_out)
    throw ConfigError("the generator trunk preserves the temporal extent, so n_in must equal n_out");
  if (final_resolution < 4 || (final_resolution & (final_resolution - 1)) != 0)
    throw ConfigError("final_resolution must be a power of two >= 4");
  if (base_channels < 1 || min_channels < 1 || min_channels > base_channels)
    throw ConfigError("need base_channels >= min_channels >= 1");
  if (lr <= 0.0) throw ConfigError("learning rate must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0) throw ConfigError("beta1 must be in [0, 1)");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
}

void ProgressiveSchedule::validate() const {
  if (epochs_per_stage < 0) throw ConfigError("epochs_per_stage must be >= 0");
  if (fade_fraction < 0.0 || fade_fraction > 1.0)
    throw ConfigError("fade_fraction must be in [0, 1]");
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must be in [0, 1]");
}

namespace {

template <class... Ms>
ModulePtr seq(std::string name, Ms... parts) {
  auto s = std::make_unique<nn::Sequential>(std::move(name));
  (s->add(std::move(parts)), ...);
  return s;
}

ModulePtr rgb_in_block(const char* prefix, const PredictorConfig& c, int res) {
  const std::string n = std::string(prefix) + ".from_rgb_" + std::to_string(res);
  return seq(n, std::make_unique<nn::Conv3d>(n + ".conv", 3, c.channels_at(res), 1, 1, 0, 0, c.seed),
             std::make_unique<nn::LeakyReLU>(n + ".act"));
}

ModulePtr rgb_out_block(const PredictorConfig& c, int res) {
  const std::string n = "g.to_rgb_" + std::to_string(res);
  return seq(n, std::make_unique<nn::Conv3d>(n + ".conv", c.channels_at(res), 3, 1, 1, 0, 0, c.seed),
             std::make_unique<nn::Sigmoid>(n + ".act"));
}

ModulePtr enc_block(const PredictorConfig& c, int res) {
  const std::string n = "g.enc_" + std::to_string(res);
  auto s = std::make_unique<nn::Sequential>(n);
  s->add(std::make_unique<nn::Conv3d>(n + ".conv", c.channels_at(res), c.channels_at(res / 2), 3, 3,
                                      1, 1, c.seed));
  s->add(std::make_unique<nn::LeakyReLU>(n + ".act"));
  if (c.pixel_norm) s->add(std::make_unique<nn::PixelNorm>(n + ".norm"));
  s->add(std::make_unique<nn::AvgPoolSpatial>(n + ".pool"));
  return s;
}

ModulePtr dec_block(const PredictorConfig& c, int res) {
  const std::string n = "g.dec_" + std::to_string(res);
  auto s = std::make_unique<nn::Sequential>(n);
  s->add(std::make_unique<nn::NNUpsampleSpatial>(n + ".up"));
  s->add(std::make_unique<nn::Conv3d>(n + ".conv", c.channels_at(res / 2), c.channels_at(res), 3, 3,
                                      1, 1, c.seed));
  s->add(std::make_unique<nn::LeakyReLU>(n + ".act"));
  if (c.pixel_norm) s->add(std::make_unique<nn::PixelNorm>(n + ".norm"));
  return s;
}

ModulePtr core_block(const PredictorConfig& c) {
  const std::string n = "g.core";
  const int ch = c.channels_at(4);
  auto s = std::make_unique<nn::Sequential>(n);
  s->add(std::make_unique<nn::Conv3d>(n + ".conv1", ch, ch, 3, 3, 1, 1, c.seed));
  s->add(std::make_unique<nn::LeakyReLU>(n + ".act1"));
  if (c.pixel_norm) s->add(std::make_unique<nn::PixelNorm>(n + ".norm1"));
  s->add(std::make_unique<nn::Conv3d>(n + ".conv2", ch, ch, 3, 3, 1, 1, c.seed));
  s->add(std::make_unique<nn::LeakyReLU>(n + ".act2"));
  if (c.pixel_norm) s->add(std::make_unique<nn::PixelNorm>(n + ".norm2"));
  return s;
}

ModulePtr critic_block(const PredictorConfig& c, int res) {
  const std::string n = "d.block_" + std::to_string(res);
  return seq(n,
             std::make_unique<nn::Conv3d>(n + ".conv", c.channels_at(res), c.channels_at(res / 2),
                                          3, 3, 1, 1, c.seed),
             std::make_unique<nn::LeakyReLU>(n + ".act"),
             std::make_unique<nn::AvgPoolSpatial>(n + ".pool"));
}

ModulePtr critic_head(const PredictorConfig& c) {
  const std::string n = "d.head";
  const int ch = c.channels_at(4);
  const int flat = ch * (c.n_in + c.n_out) * 4 * 4;
  return seq(n, std::make_unique<nn::Conv3d>(n + ".conv", ch, ch, 3, 3, 1, 1, c.seed),
             std::make_unique<nn::LeakyReLU>(n + ".act"),
             std::make_unique<nn::Flatten>(n + ".flatten"),
             std::make_unique<nn::Dense>(n + ".dense", flat, 1, c.seed));
}

std::vector<nn::Param*> collect_from(const std::vector<Module*>& mods) {
  std::vector<nn::Param*> out;
  for (Module* m : mods) m->collect_params(out);
  return out;
}

void check_video_input(const Tensor& x, int t, int res, const char* who) {
  if (x.shape.rank != 5 || x.shape[1] != 3 || x.shape[2] != t || x.shape[3] != res ||
      x.shape[4] != res)
    throw std::invalid_argument(std::string(who) + ": expected (N,3," + std::to_string(t) + "," +
                                std::to_string(res) + "," + std::to_string(res) + "), got " +
                                x.shape.str());
}

}  // namespace

PredictorState PredictorState::build(const PredictorConfig& cfg, int stage) {
  cfg.validate();
  PredictorState st;
  st.cfg = cfg;
  st.opt_g = nn::Adam(cfg.beta1);
  st.opt_d = nn::Adam(cfg.beta1);
  st.grow_to_stage(stage);
  return st;
}

void PredictorState::grow_to_stage(int target) {
  const auto lad = cfg.ladder();
  if (target < 0 || target >= static_cast<int>(lad.size()))
    throw std::invalid_argument("stage out of range for a ladder of " +
                                std::to_string(lad.size()) + " rungs");
  if (target < stage) throw std::invalid_argument("progressive growth cannot reduce the stage");
  if (!g_core_) {
    g_core_ = core_block(cfg);
    d_head_ = critic_head(cfg);
  }
  for (int k = 0; k <= target; ++k) {
    const int res = lad[static_cast<size_t>(k)];
    if (!g_from_rgb_.count(res)) {
      g_from_rgb_[res] = rgb_in_block("g", cfg, res);
      g_to_rgb_[res] = rgb_out_block(cfg, res);
      d_from_rgb_[res] = rgb_in_block("d", cfg, res);
    }
    if (res > 4 && !g_enc_.count(res)) {
      g_enc_[res] = enc_block(cfg, res);
      g_dec_[res] = dec_block(cfg, res);
      d_block_[res] = critic_block(cfg, res);
    }
  }
  stage = target;
}

std::vector<Module*> PredictorState::g_chain(int s) {
  if (s < 0 || s > stage) throw std::invalid_argument("generator stage not built");
  const int res = cfg.ladder()[static_cast<size_t>(s)];
  std::vector<Module*> chain;
  chain.push_back(g_from_rgb_.at(res).get());
  for (int r = res; r > 4; r /= 2) chain.push_back(g_enc_.at(r).get());
  chain.push_back(g_core_.get());
  for (int r = 8; r <= res; r *= 2) chain.push_back(g_dec_.at(r).get());
  chain.push_back(g_to_rgb_.at(res).get());
  return chain;
}

std::vector<Module*> PredictorState::d_chain(int s) {
  if (s < 0 || s > stage) throw std::invalid_argument("critic stage not built");
  const int res = cfg.ladder()[static_cast<size_t>(s)];
  std::vector<Module*> chain;
  chain.push_back(d_from_rgb_.at(res).get());
  for (int r = res; r > 4; r /= 2) chain.push_back(d_block_.at(r).get());
  chain.push_back(d_head_.get());
  return chain;
}

Tensor PredictorState::g_forward(const Tensor& x, int s) {
  check_video_input(x, cfg.n_in, cfg.ladder()[static_cast<size_t>(s)], "generator");
  Tensor h = x;
  for (Module* m : g_chain(s)) h = m->forward(h);
  return h;
}

Tensor PredictorState::g_backward(const Tensor& dy, int s, bool accumulate) {
  auto chain = g_chain(s);
  Tensor g = dy;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) g = (*it)->backward(g, accumulate);
  return g;
}

std::vector<double> PredictorState::d_forward(const Tensor& x, int s) {
  check_video_input(x, cfg.n_in + cfg.n_out, cfg.ladder()[static_cast<size_t>(s)], "critic");
  Tensor h = x;
  for (Module* m : d_chain(s)) h = m->forward(h);
  std::vector<double> scores(h.v.size());
  for (size_t i = 0; i < h.v.size(); ++i) scores[i] = h.v[i];
  return scores;
}

Tensor PredictorState::d_backward(const std::vector<double>& dscore, int s, bool accumulate) {
  Tensor g(nn::Shape{static_cast<int>(dscore.size()), 1});
  for (size_t i = 0; i < dscore.size(); ++i) g.v[i] = static_cast<float>(dscore[i]);
  auto chain = d_chain(s);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    g = (*it)->backward(g, accumulate);
  return g;
}

std::vector<nn::Param*> PredictorState::g_params(bool include_previous_stage) {
  auto mods = g_chain(stage);
  if (include_previous_stage && stage > 0) {
    // the previous chain differs from the current one only by its adapters
    const int prev = cfg.ladder()[static_cast<size_t>(stage - 1)];
    mods.push_back(g_from_rgb_.at(prev).get());
    mods.push_back(g_to_rgb_.at(prev).get());
  }
  return collect_from(mods);
}

std::vector<nn::Param*> PredictorState::d_params(bool include_previous_stage) {
  auto mods = d_chain(stage);
  if (include_previous_stage && stage > 0)
    mods.push_back(d_from_rgb_.at(cfg.ladder()[static_cast<size_t>(stage - 1)]).get());
  return collect_from(mods);
}

std::vector<nn::Param*> PredictorState::all_params() {
  std::vector<Module*> mods;
  for (auto& [res, m] : g_from_rgb_) mods.push_back(m.get());
  for (auto& [res, m] : g_enc_) mods.push_back(m.get());
  mods.push_back(g_core_.get());
  for (auto& [res, m] : g_dec_) mods.push_back(m.get());
  for (auto& [res, m] : g_to_rgb_) mods.push_back(m.get());
  for (auto& [res, m] : d_from_rgb_) mods.push_back(m.get());
  for (auto& [res, m] : d_block_) mods.push_back(m.get());
  mods.push_back(d_head_.get());
  return collect_from(mods);
}

std::vector<nn::LayerInfo> PredictorState::describe_g() const {
  std::vector<nn::LayerInfo> out;
  auto* self = const_cast<PredictorState*>(this);
  for (Module* m : self->g_chain(stage)) m->describe(out);
  return out;
}

std::vector<data::Frame> PredictorState::predict(const std::vector<data::Frame>& inputs) {
  if (static_cast<int>(inputs.size()) != cfg.n_in)
    throw std::invalid_argument("predict: expected " + std::to_string(cfg.n_in) + " input frames");
  const int res = resolution();
  for (const auto& f : inputs) {
    f.validate();
    if (f.channels != 3 || f.height != res || f.width != res)
      throw std::invalid_argument("predict: frames must be 3-channel " + std::to_string(res) + "x" +
                                  std::to_string(res));
  }
  Tensor x = nn::video_batch({inputs});
  Tensor y = (stage > 0 && alpha < 1.0) ? forward_blended(x, alpha) : g_forward(x, stage);
  return std::move(nn::video_unbatch(y)[0]);
}

Tensor PredictorState::forward_blended(const Tensor& x, double a) {
  if (stage < 1) throw std::invalid_argument("forward_blended needs a previous stage to blend with");
  if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("alpha must be in [0, 1]");
  if (a >= 1.0) return g_forward(x, stage);
  Tensor down = nn::avgpool_spatial2(x);
  Tensor out = nn::nn_upsample_spatial2(g_forward(down, stage - 1));
  if (a <= 0.0) return out;
  Tensor cur = g_forward(x, stage);
  kern::scale(static_cast<float>(1.0 - a), out.data(), out.v.size());
  kern::axpy(static_cast<float>(a), cur.data(), out.data(), out.v.size());
  return out;
}

// ===== persistence =====

namespace {

nlohmann::json config_json(const PredictorConfig& c) {
  return {{"n_in", c.n_in},
          {"n_out", c.n_out},
          {"final_resolution", c.final_resolution},
          {"base_channels", c.base_channels},
          {"min_channels", c.min_channels},
          {"pixel_norm", c.pixel_norm},
          {"seed", c.seed},
          {"lr", c.lr},
          {"beta1", c.beta1},
          {"batch_size", c.batch_size}};
}

PredictorConfig config_from_json(const nlohmann::json& j) {
  PredictorConfig c;
  c.n_in = j.at("n_in").get<int>();
  c.n_out = j.at("n_out").get<int>();
  c.final_resolution = j.at("final_resolution").get<int>();
  c.base_channels = j.at("base_channels").get<int>();
  c.min_channels = j.at("min_channels").get<int>();
  c.pixel_norm = j.at("pixel_norm").get<bool>();
  c.seed = j.at("seed").get<uint64_t>();
  c.lr = j.at("lr").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  return c;
}

}  // namespace

void save_predictor(PredictorState& state, const std::filesystem::path& path) {
  nlohmann::json meta = {{"config", config_json(state.cfg)},
                         {"stage", state.stage},
                         {"alpha", state.alpha},
                         {"epochs_done", state.epochs_done},
                         {"adam_t_g", state.opt_g.step_count()},
                         {"adam_t_d", state.opt_d.step_count()}};
  nn::CheckpointData data = nn::snapshot_checkpoint("predictor", meta, state.all_params(), nullptr);
  for (const auto& [name, mo] : state.opt_g.state()) data.adam.push_back({name, mo.m, mo.v});
  for (const auto& [name, mo] : state.opt_d.state()) data.adam.push_back({name, mo.m, mo.v});
  nn::save_checkpoint(data, path.string());
}

PredictorState load_predictor(const std::filesystem::path& path) {
  nn::CheckpointData data = nn::load_checkpoint(path.string());
  if (data.kind != "predictor")
    throw IoError("expected a predictor checkpoint, found kind '" + data.kind + "'");
  PredictorConfig cfg = config_from_json(data.meta.at("config"));
  PredictorState st = PredictorState::build(cfg, data.meta.at("stage").get<int>());
  st.alpha = data.meta.at("alpha").get<double>();
  st.epochs_done = data.meta.value("epochs_done", 0);
  nn::restore_params(data, st.all_params(), false, false);
  for (const auto& e : data.adam) {
    nn::Adam& opt = e.name.rfind("d.", 0) == 0 ? st.opt_d : st.opt_g;
    opt.state()[e.name] = {e.m, e.v};
  }
  st.opt_g.set_step_count(data.meta.value("adam_t_g", int64_t{0}));
  st.opt_d.set_step_count(data.meta.value("adam_t_d", int64_t{0}));
  return st;
}

}  // namespace framecast::pred
