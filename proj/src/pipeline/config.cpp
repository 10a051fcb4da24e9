#include "pipeline/config.hpp"

#include <fstream>

#include "core/errors.hpp"
#include "core/hash.hpp"

namespace framecast::pipe {

namespace {

using nlohmann::json;

data::EdgeRule edge_rule_from_string(const std::string& s) {
  if (s == "bounce") return data::EdgeRule::bounce;
  if (s == "wrap") return data::EdgeRule::wrap;
  throw ConfigError("unknown edge rule '" + s + "' (expected bounce or wrap)");
}

losses::ExtractorKind extractor_kind_from_string(const std::string& s) {
  if (s == "fixed_random") return losses::ExtractorKind::fixed_random;
  if (s == "vgg19_file") return losses::ExtractorKind::vgg19_file;
  throw ConfigError("unknown extractor kind '" + s + "' (expected fixed_random or vgg19_file)");
}

// Rejects keys that the reference document does not contain, recursing into
// sections. Catches both config-file typos and stale option names.
void check_known_keys(const json& doc, const json& ref, const std::string& prefix) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!ref.is_object() || !ref.contains(it.key()))
      throw ConfigError("unknown config key '" + path + "'");
    if (it->is_object()) check_known_keys(*it, ref.at(it.key()), path);
  }
}

const json& section(const json& doc, const char* name) {
  if (!doc.contains(name)) throw ConfigError(std::string("config is missing the '") + name + "' section");
  return doc.at(name);
}

}  // namespace

nlohmann::json default_config() {
  return json{
      {"seed", 1234},
      {"out_dir", "runs"},
      {"data",
       {
           {"clip_count", 12},
           {"frames_per_clip", 40},
           {"canvas", 128},
           {"base_resolution", 32},
           {"fps", 17.0},
           {"shape_count", 2},
           {"min_speed", 2.0},
           {"max_speed", 8.0},
           {"min_size", 28.0},
           {"max_size", 44.0},
           {"edge_rule", "bounce"},
           {"blur_sigma", 1.2},
           {"n_in", 5},
           {"n_out", 5},
           {"window_stride", 0},
           {"train_ratio", 0.75},
       }},
      {"predictor",
       {
           {"final_resolution", 32},
           {"base_channels", 32},
           {"min_channels", 8},
           {"pixel_norm", true},
           {"lr", 1e-3},
           {"beta1", 0.0},
           {"batch_size", 4},
           {"epochs_per_stage", 8},
           {"fade_fraction", 0.5},
       }},
      {"enhancer",
       {
           {"base_width", 16},
           {"res_blocks", 3},
           {"lr", 1e-4},
           {"beta1", 0.5},
           {"batch_size", 4},
           {"epochs", 12},
           {"warmup_epochs", 2},
       }},
      {"loss",
       {
           {"kind", "wasserstein_gp"},
           {"lambda", 50.0},
           {"gp_weight", 10.0},
           {"extractor",
            {
                {"kind", "fixed_random"},
                {"block", 3},
                {"conv", 3},
                {"base_width", 8},
                {"seed", 7},
                {"weights_path", ""},
            }},
       }},
      {"eval",
       {
           {"iou_threshold", 0.5},
           {"eleven_point", true},
           {"detector",
            {
                {"threshold", 0.5},
                {"min_area", 6},
                {"fill_cutoff", 0.85},
            }},
       }},
  };
}

nlohmann::json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json file;
  try {
    file = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  if (!file.is_object()) throw ConfigError("config file " + path.string() + " is not a JSON object");
  json doc = default_config();
  check_known_keys(file, doc, "");
  doc.merge_patch(file);
  return doc;
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key.path=value");
  const std::string path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);

  json* node = &doc;
  size_t begin = 0;
  while (begin <= path.size()) {
    const size_t dot = path.find('.', begin);
    const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
    if (key.empty() || !node->is_object() || !node->contains(key))
      throw ConfigError("unknown config key '" + path + "'");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    begin = dot + 1;
  }
  if (node->is_object())
    throw ConfigError("config key '" + path + "' is a section, not a value");

  json value;
  if (node->is_string()) {
    value = raw;
  } else {
    value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    if (node->is_boolean() != value.is_boolean() || node->is_number() != value.is_number())
      throw ConfigError("value for '" + path + "' must match the type of the default (" +
                        std::string(node->type_name()) + "), got: " + raw);
  }
  *node = value;
}

nlohmann::json resolve_config(const std::optional<std::filesystem::path>& file,
                              const std::vector<std::string>& overrides) {
  json doc = file ? load_config(*file) : default_config();
  for (const std::string& o : overrides) apply_override(doc, o);
  return doc;
}

void DataConfig::validate() const {
  if (clip_count < 1) throw ConfigError("data.clip_count must be positive");
  if (frames_per_clip < n_in + n_out)
    throw ConfigError("data.frames_per_clip is shorter than one prediction window");
  if (canvas < 4 || base_resolution < 4)
    throw ConfigError("data.canvas and data.base_resolution must be at least 4");
  if (canvas % base_resolution != 0 || canvas / base_resolution != 4)
    throw ConfigError("data.canvas must be 4x data.base_resolution");
  if (n_in < 1 || n_out < 1) throw ConfigError("data.n_in and data.n_out must be positive");
  if (window_stride < 0) throw ConfigError("data.window_stride must not be negative");
  if (train_ratio <= 0.0 || train_ratio >= 1.0)
    throw ConfigError("data.train_ratio must lie strictly between 0 and 1");
  if (blur_sigma < 0.0) throw ConfigError("data.blur_sigma must not be negative");
}

DataConfig data_config(const nlohmann::json& doc) {
  const json& d = section(doc, "data");
  DataConfig c;
  c.clip_count = d.at("clip_count").get<int>();
  c.frames_per_clip = d.at("frames_per_clip").get<int>();
  c.canvas = d.at("canvas").get<int>();
  c.base_resolution = d.at("base_resolution").get<int>();
  c.fps = d.at("fps").get<double>();
  c.shape_count = d.at("shape_count").get<int>();
  c.min_speed = d.at("min_speed").get<double>();
  c.max_speed = d.at("max_speed").get<double>();
  c.min_size = d.at("min_size").get<double>();
  c.max_size = d.at("max_size").get<double>();
  c.edge_rule = edge_rule_from_string(d.at("edge_rule").get<std::string>());
  c.blur_sigma = d.at("blur_sigma").get<double>();
  c.n_in = d.at("n_in").get<int>();
  c.n_out = d.at("n_out").get<int>();
  c.window_stride = d.at("window_stride").get<int>();
  c.train_ratio = d.at("train_ratio").get<double>();
  c.validate();
  return c;
}

data::ShapesConfig shapes_config(const nlohmann::json& doc) {
  const DataConfig d = data_config(doc);
  data::ShapesConfig s;
  s.canvas = d.canvas;
  s.frame_count = d.frames_per_clip;
  s.fps = d.fps;
  s.shape_count = d.shape_count;
  s.min_speed = d.min_speed;
  s.max_speed = d.max_speed;
  s.min_size = d.min_size;
  s.max_size = d.max_size;
  s.edge_rule = d.edge_rule;
  s.blur_sigma = 0.0;
  return s;
}

pred::PredictorConfig predictor_config(const nlohmann::json& doc) {
  const json& p = section(doc, "predictor");
  const DataConfig d = data_config(doc);
  pred::PredictorConfig c;
  c.n_in = d.n_in;
  c.n_out = d.n_out;
  c.final_resolution = p.at("final_resolution").get<int>();
  c.base_channels = p.at("base_channels").get<int>();
  c.min_channels = p.at("min_channels").get<int>();
  c.pixel_norm = p.at("pixel_norm").get<bool>();
  c.seed = combine_seed(doc.at("seed").get<uint64_t>(), "predictor");
  c.lr = p.at("lr").get<double>();
  c.beta1 = p.at("beta1").get<double>();
  c.batch_size = p.at("batch_size").get<int>();
  if (c.final_resolution != d.base_resolution)
    throw ConfigError("predictor.final_resolution must equal data.base_resolution");
  c.validate();
  return c;
}

pred::ProgressiveSchedule predictor_schedule(const nlohmann::json& doc) {
  const json& p = section(doc, "predictor");
  pred::ProgressiveSchedule s;
  s.epochs_per_stage = p.at("epochs_per_stage").get<int>();
  s.fade_fraction = p.at("fade_fraction").get<double>();
  s.validate();
  return s;
}

enh::EnhancerConfig enhancer_config(const nlohmann::json& doc, enh::Task task,
                                    enh::UpsamplerKind upsampler) {
  const json& e = section(doc, "enhancer");
  enh::EnhancerConfig c;
  c.task = task;
  c.upsampler =
      task == enh::Task::super_resolve ? enh::UpsamplerKind::nn_upsample_then_conv : upsampler;
  c.base_width = e.at("base_width").get<int>();
  c.res_blocks = e.at("res_blocks").get<int>();
  c.seed = combine_seed(doc.at("seed").get<uint64_t>(),
                        "enhancer." + to_string(task) + "." + to_string(c.upsampler));
  c.lr = e.at("lr").get<double>();
  c.beta1 = e.at("beta1").get<double>();
  c.batch_size = e.at("batch_size").get<int>();
  c.warmup_epochs = e.at("warmup_epochs").get<int>();
  c.validate();
  return c;
}

int enhancer_epochs(const nlohmann::json& doc) {
  const int epochs = section(doc, "enhancer").at("epochs").get<int>();
  if (epochs < 0) throw ConfigError("enhancer.epochs must not be negative");
  return epochs;
}

losses::LossConfig loss_config(const nlohmann::json& doc) {
  const json& l = section(doc, "loss");
  losses::LossConfig c;
  c.kind = losses::adv_kind_from_string(l.at("kind").get<std::string>());
  c.lambda = l.at("lambda").get<double>();
  c.gp_weight = l.at("gp_weight").get<double>();
  const json& x = l.at("extractor");
  c.extractor.kind = extractor_kind_from_string(x.at("kind").get<std::string>());
  c.extractor.block = x.at("block").get<int>();
  c.extractor.conv = x.at("conv").get<int>();
  c.extractor.base_width = x.at("base_width").get<int>();
  c.extractor.seed = x.at("seed").get<uint64_t>();
  c.extractor.weights_path = x.at("weights_path").get<std::string>();
  c.validate();
  return c;
}

EvalConfig eval_config(const nlohmann::json& doc) {
  const json& e = section(doc, "eval");
  EvalConfig c;
  c.iou_threshold = e.at("iou_threshold").get<double>();
  c.eleven_point = e.at("eleven_point").get<bool>();
  const json& d = e.at("detector");
  c.detector.threshold = d.at("threshold").get<double>();
  c.detector.min_area = d.at("min_area").get<int>();
  c.detector.fill_cutoff = d.at("fill_cutoff").get<double>();
  if (c.iou_threshold <= 0.0 || c.iou_threshold > 1.0)
    throw ConfigError("eval.iou_threshold must lie in (0, 1]");
  return c;
}

}  // namespace framecast::pipe
