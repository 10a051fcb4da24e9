#include "losses/feature_extractor.hpp"

#include <stdexcept>

#include "core/errors.hpp"
#include "kern/kernels.hpp"
#include "nn/bridge.hpp"
#include "nn/checkpoint.hpp"

namespace framecast::losses {

namespace {

constexpr int kConvsPerBlock[5] = {2, 2, 4, 4, 4};
constexpr int kVggWidths[5] = {64, 128, 256, 512, 512};

int reduced_width(int base, int block) {
  const int factor = block >= 3 ? 4 : (1 << (block - 1));
  return base * factor;
}

}  // namespace

FeatureExtractor FeatureExtractor::make(const FeatureExtractorSpec& spec) {
  if (spec.block < 1 || spec.block > 5)
    throw std::invalid_argument("feature extractor: block index must lie in 1..5");
  if (spec.conv < 0 || spec.conv > kConvsPerBlock[spec.block - 1])
    throw std::invalid_argument("feature extractor: conv index out of range for block");
  if (spec.channels != 1 && spec.channels != 3)
    throw std::invalid_argument("feature extractor: channels must be 1 or 3");
  if (spec.base_width < 1) throw std::invalid_argument("feature extractor: base_width must be >= 1");

  FeatureExtractor fx;
  fx.spec_ = spec;
  fx.net_ = std::make_shared<nn::Sequential>("fx");

  const bool vgg = spec.kind == ExtractorKind::vgg19_file;
  int cin = spec.channels;
  for (int b = 1; b <= spec.block; ++b) {
    const int convs_here = b < spec.block ? kConvsPerBlock[b - 1] : spec.conv;
    const int width = vgg ? kVggWidths[b - 1] : reduced_width(spec.base_width, b);
    for (int k = 1; k <= convs_here; ++k) {
      const std::string nm = "conv" + std::to_string(b) + "_" + std::to_string(k);
      fx.net_->add(std::make_unique<nn::Conv2d>(nm, cin, width, 3, 1, spec.seed));
      fx.net_->add(std::make_unique<nn::LeakyReLU>(nm + ".relu", 0.0f));
      cin = width;
    }
    if (b < spec.block)
      fx.net_->add(std::make_unique<nn::MaxPool2d>("pool" + std::to_string(b)));
  }

  if (vgg) {
    if (spec.weights_path.empty())
      throw ConfigError("feature extractor: vgg19_file kind requires a weights path");
    nn::CheckpointData data;
    try {
      data = nn::load_checkpoint(spec.weights_path);
    } catch (const IoError&) {
      throw MissingDataError("feature extractor weights not readable: " + spec.weights_path);
    }
    std::vector<nn::Param*> params;
    fx.net_->collect_params(params);
    nn::restore_params(data, params, /*allow_missing=*/false, /*allow_extra=*/true);
  }
  return fx;
}

nn::Tensor FeatureExtractor::features(const nn::Tensor& x) {
  if (x.shape.rank != 4) throw std::invalid_argument("feature extractor: expected (N,C,H,W)");
  if (x.shape[1] != spec_.channels)
    throw std::invalid_argument("feature extractor: channel mismatch");
  if (is_identity()) return x;
  return net_->forward(x);
}

nn::Tensor FeatureExtractor::backward_to_input(const nn::Tensor& dfeat) {
  if (is_identity()) return dfeat;
  return net_->backward(dfeat, /*accumulate_param_grads=*/false);
}

std::vector<nn::LayerInfo> FeatureExtractor::layers() const {
  std::vector<nn::LayerInfo> out;
  if (net_) net_->describe(out);
  return out;
}

double content_loss(FeatureExtractor& extractor, const data::Frame& sharp,
                    const data::Frame& generated) {
  sharp.validate();
  generated.validate();
  if (!sharp.same_dims(generated))
    throw std::invalid_argument("content_loss: frames must share dimensions");
  return content_loss_batch(extractor, nn::image_batch({sharp}), nn::image_batch({generated}),
                            nullptr);
}

double content_loss_batch(FeatureExtractor& extractor, const nn::Tensor& sharp,
                          const nn::Tensor& generated, nn::Tensor* dgen) {
  if (sharp.shape != generated.shape)
    throw std::invalid_argument("content_loss: batch shape mismatch");

  // Two forward passes; the generated pass runs second so the cached
  // activations belong to it when we backpropagate.
  const nn::Tensor fs = extractor.features(sharp);
  const nn::Tensor fg = extractor.features(generated);

  const int n = fg.shape[0];
  const size_t stride = static_cast<size_t>(fg.numel() / n);
  nn::Tensor diff(fg.shape);
  kern::sub(fg.data(), fs.data(), diff.data(), diff.v.size());

  double loss = 0.0;
  for (int i = 0; i < n; ++i)
    loss += kern::sumsq(diff.data() + i * stride, stride) / static_cast<double>(stride);
  loss /= static_cast<double>(n);

  if (dgen) {
    // d/dfg of mean_n sumsq(diff_n)/stride is 2*diff/(stride*n).
    const float g = static_cast<float>(2.0 / (static_cast<double>(stride) * n));
    kern::scale(g, diff.data(), diff.v.size());
    *dgen = extractor.backward_to_input(diff);
  }
  return loss;
}

}  // namespace framecast::losses
