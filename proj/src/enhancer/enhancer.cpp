#include "enhancer/enhancer.hpp"

#include <stdexcept>
#include <utility>

#include "core/errors.hpp"
#include "nn/bridge.hpp"
#include "nn/checkpoint.hpp"

namespace framecast::enh {

using nn::Module;
using nn::ModulePtr;
using nn::Tensor;

Task task_from_string(const std::string& s) {
  if (s == "deblur") return Task::deblur;
  if (s == "super_resolve") return Task::super_resolve;
  throw ConfigError("unknown enhancement task: " + s);
}

std::string to_string(Task t) { return t == Task::deblur ? "deblur" : "super_resolve"; }

UpsamplerKind upsampler_from_string(const std::string& s) {
  if (s == "transposed_conv") return UpsamplerKind::transposed_conv;
  if (s == "nn_upsample_then_conv") return UpsamplerKind::nn_upsample_then_conv;
  throw ConfigError("unknown upsampler kind: " + s);
}

std::string to_string(UpsamplerKind k) {
  return k == UpsamplerKind::transposed_conv ? "transposed_conv" : "nn_upsample_then_conv";
}

void EnhancerConfig::validate() const {
  if (base_width < 1) throw ConfigError("base_width must be positive");
  if (res_blocks < 1) throw ConfigError("res_blocks must be positive");
  if (lr <= 0.0) throw ConfigError("learning rate must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0) throw ConfigError("beta1 must be in [0, 1)");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (warmup_epochs < 0) throw ConfigError("warmup_epochs must be >= 0");
}

namespace {

ModulePtr res_block(const std::string& name, int ch, uint64_t seed) {
  auto inner = std::make_unique<nn::Sequential>(name + ".inner");
  inner->add(std::make_unique<nn::Conv2d>(name + ".conv1", ch, ch, 3, 1, seed));
  inner->add(std::make_unique<nn::LeakyReLU>(name + ".act"));
  inner->add(std::make_unique<nn::Conv2d>(name + ".conv2", ch, ch, 3, 1, seed));
  return std::make_unique<nn::ResidualBlock>(name, std::move(inner));
}

void add_upsampler(nn::Sequential& s, const std::string& name, int cin, int cout,
                   UpsamplerKind kind, uint64_t seed) {
  if (kind == UpsamplerKind::transposed_conv) {
    s.add(std::make_unique<nn::ConvTranspose2d>(name + ".tconv", cin, cout, 3, 2, 1, 1, seed));
  } else {
    s.add(std::make_unique<nn::NNUpsampleSpatial>(name + ".up"));
    s.add(std::make_unique<nn::Conv2d>(name + ".conv", cin, cout, 3, 1, seed));
  }
  s.add(std::make_unique<nn::LeakyReLU>(name + ".act"));
}

// Deblur: conv7 head, two conv+pool downsamplings, a residual trunk, two
// upsampler stages back to full size, then a zero-init conv7 + tanh
// correction added onto the input and clamped.
ModulePtr build_deblur_generator(const EnhancerConfig& c) {
  const int w = c.base_width;
  auto net = std::make_unique<nn::Sequential>("g.net");
  net->add(std::make_unique<nn::Conv2d>("g.head.conv", 3, w, 7, 3, c.seed));
  net->add(std::make_unique<nn::LeakyReLU>("g.head.act"));
  net->add(std::make_unique<nn::Conv2d>("g.down1.conv", w, 2 * w, 3, 1, c.seed));
  net->add(std::make_unique<nn::AvgPoolSpatial>("g.down1.pool"));
  net->add(std::make_unique<nn::LeakyReLU>("g.down1.act"));
  net->add(std::make_unique<nn::Conv2d>("g.down2.conv", 2 * w, 4 * w, 3, 1, c.seed));
  net->add(std::make_unique<nn::AvgPoolSpatial>("g.down2.pool"));
  net->add(std::make_unique<nn::LeakyReLU>("g.down2.act"));
  for (int i = 0; i < c.res_blocks; ++i)
    net->add(res_block("g.res" + std::to_string(i + 1), 4 * w, c.seed));
  add_upsampler(*net, "g.up1", 4 * w, 2 * w, c.upsampler, c.seed);
  add_upsampler(*net, "g.up2", 2 * w, w, c.upsampler, c.seed);
  net->add(std::make_unique<nn::Conv2d>("g.out.conv", w, 3, 7, 3, c.seed, 0.0));
  net->add(std::make_unique<nn::Tanh>("g.out.act"));
  return std::make_unique<nn::GlobalPixelResidual>("g", std::move(net));
}

// Super-resolution: conv9 head, residual trunk with a long skip, two
// upsample-conv stages (4x total), conv9 + sigmoid output.
ModulePtr build_sr_generator(const EnhancerConfig& c) {
  const int w = c.base_width;
  auto g = std::make_unique<nn::Sequential>("g");
  g->add(std::make_unique<nn::Conv2d>("g.head.conv", 3, w, 9, 4, c.seed));
  g->add(std::make_unique<nn::LeakyReLU>("g.head.act"));
  auto trunk = std::make_unique<nn::Sequential>("g.trunk.inner");
  for (int i = 0; i < c.res_blocks; ++i)
    trunk->add(res_block("g.res" + std::to_string(i + 1), w, c.seed));
  trunk->add(std::make_unique<nn::Conv2d>("g.trunk.conv", w, w, 3, 1, c.seed));
  g->add(std::make_unique<nn::ResidualBlock>("g.trunk", std::move(trunk)));
  add_upsampler(*g, "g.up1", w, w, UpsamplerKind::nn_upsample_then_conv, c.seed);
  add_upsampler(*g, "g.up2", w, w, UpsamplerKind::nn_upsample_then_conv, c.seed);
  g->add(std::make_unique<nn::Conv2d>("g.out.conv", w, 3, 9, 4, c.seed));
  g->add(std::make_unique<nn::Sigmoid>("g.out.act"));
  return g;
}

// Patch critic: strided-down conv stack ending in a single-channel map whose
// mean is the score, so any input size works.
ModulePtr build_critic(const EnhancerConfig& c) {
  const int w = c.base_width;
  auto d = std::make_unique<nn::Sequential>("d");
  d->add(std::make_unique<nn::Conv2d>("d.conv1", 3, w, 3, 1, c.seed));
  d->add(std::make_unique<nn::LeakyReLU>("d.act1"));
  d->add(std::make_unique<nn::AvgPoolSpatial>("d.pool1"));
  d->add(std::make_unique<nn::Conv2d>("d.conv2", w, 2 * w, 3, 1, c.seed));
  d->add(std::make_unique<nn::LeakyReLU>("d.act2"));
  d->add(std::make_unique<nn::AvgPoolSpatial>("d.pool2"));
  d->add(std::make_unique<nn::Conv2d>("d.conv3", 2 * w, 2 * w, 3, 1, c.seed));
  d->add(std::make_unique<nn::LeakyReLU>("d.act3"));
  d->add(std::make_unique<nn::Conv2d>("d.conv4", 2 * w, 1, 3, 1, c.seed));
  d->add(std::make_unique<nn::MeanReduce>("d.score"));
  return d;
}

}  // namespace

EnhancerState EnhancerState::build(const EnhancerConfig& cfg) {
  cfg.validate();
  EnhancerState st;
  st.cfg = cfg;
  st.opt_g = nn::Adam(cfg.beta1);
  st.opt_d = nn::Adam(cfg.beta1);
  st.g_ = cfg.task == Task::deblur ? build_deblur_generator(cfg) : build_sr_generator(cfg);
  st.d_ = build_critic(cfg);
  return st;
}

Tensor EnhancerState::g_forward(const Tensor& x) {
  if (x.shape.rank != 4 || x.shape[1] != 3)
    throw std::invalid_argument("enhancer: expected an (N,3,H,W) batch");
  return g_->forward(x);
}

Tensor EnhancerState::g_backward(const Tensor& dy, bool accumulate) {
  return g_->backward(dy, accumulate);
}

std::vector<double> EnhancerState::d_forward(const Tensor& x) {
  Tensor y = d_->forward(x);
  std::vector<double> scores(y.v.size());
  for (size_t i = 0; i < y.v.size(); ++i) scores[i] = y.v[i];
  return scores;
}

Tensor EnhancerState::d_backward(const std::vector<double>& dscore, bool accumulate) {
  Tensor g(nn::Shape{static_cast<int>(dscore.size()), 1});
  for (size_t i = 0; i < dscore.size(); ++i) g.v[i] = static_cast<float>(dscore[i]);
  return d_->backward(g, accumulate);
}

std::vector<nn::Param*> EnhancerState::g_params() {
  std::vector<nn::Param*> out;
  g_->collect_params(out);
  return out;
}

std::vector<nn::Param*> EnhancerState::d_params() {
  std::vector<nn::Param*> out;
  d_->collect_params(out);
  return out;
}

std::vector<nn::Param*> EnhancerState::all_params() {
  std::vector<nn::Param*> out = g_params();
  d_->collect_params(out);
  return out;
}

std::vector<nn::LayerInfo> EnhancerState::describe_g() const {
  std::vector<nn::LayerInfo> out;
  g_->describe(out);
  return out;
}

data::Frame EnhancerState::enhance_one(const data::Frame& f) {
  f.validate();
  if (f.channels != 3) throw std::invalid_argument("enhancer: frames must be RGB");
  Tensor y = g_forward(nn::image_batch({f}));
  return std::move(nn::image_unbatch(y)[0]);
}

std::vector<data::Frame> EnhancerState::enhance(const std::vector<data::Frame>& frames) {
  std::vector<data::Frame> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(enhance_one(f));
  return out;
}

namespace {

nlohmann::json config_json(const EnhancerConfig& c) {
  return {{"task", to_string(c.task)},
          {"upsampler", to_string(c.upsampler)},
          {"base_width", c.base_width},
          {"res_blocks", c.res_blocks},
          {"seed", c.seed},
          {"lr", c.lr},
          {"beta1", c.beta1},
          {"batch_size", c.batch_size},
          {"warmup_epochs", c.warmup_epochs}};
}

EnhancerConfig config_from_json(const nlohmann::json& j) {
  EnhancerConfig c;
  c.task = task_from_string(j.at("task").get<std::string>());
  c.upsampler = upsampler_from_string(j.at("upsampler").get<std::string>());
  c.base_width = j.at("base_width").get<int>();
  c.res_blocks = j.at("res_blocks").get<int>();
  c.seed = j.at("seed").get<uint64_t>();
  c.lr = j.at("lr").get<double>();
  c.beta1 = j.at("beta1").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.warmup_epochs = j.at("warmup_epochs").get<int>();
  return c;
}

}  // namespace

void save_enhancer(EnhancerState& state, const std::filesystem::path& path) {
  nlohmann::json meta = {{"config", config_json(state.cfg)},
                         {"epochs_done", state.epochs_done},
                         {"adam_t_g", state.opt_g.step_count()},
                         {"adam_t_d", state.opt_d.step_count()}};
  nn::CheckpointData data = nn::snapshot_checkpoint("enhancer", meta, state.all_params(), nullptr);
  for (const auto& [name, mo] : state.opt_g.state()) data.adam.push_back({name, mo.m, mo.v});
  for (const auto& [name, mo] : state.opt_d.state()) data.adam.push_back({name, mo.m, mo.v});
  nn::save_checkpoint(data, path.string());
}

EnhancerState load_enhancer(const std::filesystem::path& path) {
  nn::CheckpointData data = nn::load_checkpoint(path.string());
  if (data.kind != "enhancer")
    throw IoError("expected an enhancer checkpoint, found kind '" + data.kind + "'");
  EnhancerState st = EnhancerState::build(config_from_json(data.meta.at("config")));
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

}  // namespace framecast::enh
