#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "datakit/frame.hpp"
#include "nn/layers.hpp"

namespace framecast::losses {

// Frozen convolutional feature map for perceptual content losses. The
// topology mirrors a 19-layer VGG feature stack: five blocks of 3x3
// convolutions with ReLU (2, 2, 4, 4, 4 convolutions per block) and a 2x2
// max pool between blocks. Layer (i, j) means: all of blocks 1..i-1, then
// the first j convolutions of block i. Layer (1, 0) is the identity map,
// which turns the content loss into plain pixel MSE.
//
// Kinds:
//   fixed_random  - seeded He-init weights at reduced width, never trained.
//   vgg19_file    - full-width stack loaded from a checkpoint-format weights
//                   file supplied by the caller.
enum class ExtractorKind { fixed_random, vgg19_file };

struct FeatureExtractorSpec {
  ExtractorKind kind = ExtractorKind::fixed_random;
  int block = 3;  // i
  int conv = 3;   // j
  int channels = 3;
  int base_width = 8;  // fixed_random width of block 1
  uint64_t seed = 7;
  std::string weights_path;  // vgg19_file only
};

class FeatureExtractor {
 public:
  static FeatureExtractor make(const FeatureExtractorSpec& spec);

  nn::Tensor features(const nn::Tensor& x);
  // Backpropagates a feature-space gradient to the input. Parameters stay
  // frozen. Must follow a features() call on the same batch.
  nn::Tensor backward_to_input(const nn::Tensor& dfeat);

  bool is_identity() const { return !net_ || net_->size() == 0; }
  std::vector<nn::LayerInfo> layers() const;
  const FeatureExtractorSpec& spec() const { return spec_; }

 private:
  FeatureExtractorSpec spec_;
  std::shared_ptr<nn::Sequential> net_;
};

// Mean squared feature difference, normalized by the feature-map area and
// averaged over feature channels. Frames must share dimensions.
double content_loss(FeatureExtractor& extractor, const data::Frame& sharp,
                    const data::Frame& generated);

// Batched variant on (N, C, H, W) tensors; returns the batch-mean loss and,
// when dgen is non-null, the gradient w.r.t. the generated batch.
double content_loss_batch(FeatureExtractor& extractor, const nn::Tensor& sharp,
                          const nn::Tensor& generated, nn::Tensor* dgen);

}  // namespace framecast::losses
