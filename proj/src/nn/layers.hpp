#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nn/module.hpp"

namespace framecast::nn {

// Weight init: normal with std = gain * sqrt(2 / fan_in), biases zero.
// gain 0 zero-fills (used for final layers of residual generators so the
// net starts as the identity map).
Tensor he_normal(Shape s, int fan_in, double gain, uint64_t seed, const std::string& name);

// ===== convolutions =====

// 2D convolution, stride 1, symmetric zero padding. Input (N, C, H, W).
class Conv2d : public Module {
 public:
  Conv2d(std::string name, int cin, int cout, int k, int pad, uint64_t seed, double init_gain = 1.0);
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void collect_params(std::vector<Param*>& out) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  int cin_, cout_, k_, pad_;
  Param w_, b_;
  Tensor x_;
  std::vector<float> cols_;
};

// 3D convolution over (T, H, W), stride 1. Input (N, C, T, H, W). The
// temporal extent is preserved when pt = (kt - 1) / 2.
class Conv3d : public Module {
 public:
  Conv3d(std::string name, int cin, int cout, int kt, int k, int pt, int pad, uint64_t seed,
         double init_gain = 1.0);
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void collect_params(std::vector<Param*>& out) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  int cin_, cout_, kt_, k_, pt_, pad_;
  Param w_, b_;
  Tensor x_;
  std::vector<float> cols_;
};

// Transposed 2D convolution. Output size (in-1)*stride - 2*pad + k + outpad.
// With k 3, stride 2, pad 1, outpad 1 this exactly doubles H and W; kernel
// taps then overlap unevenly, which is the checkerboard mechanism the
// enhancer analysis probes.
class ConvTranspose2d : public Module {
 public:
  ConvTranspose2d(std::string name, int cin, int cout, int k, int stride, int pad, int outpad,
                  uint64_t seed, double init_gain = 1.0);
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void collect_params(std::vector<Param*>& out) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  int cin_, cout_, k_, stride_, pad_, outpad_;
  Param w_, b_;  // w stored (cin, cout*k*k)
  Tensor x_;
  std::vector<float> cols_;
};

// ===== dense =====

class Flatten : public Module {
 public:
  explicit Flatten(std::string name) : name_(std::move(name)) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  Shape in_shape_;
};

class Dense : public Module {
 public:
  Dense(std::string name, int in, int out, uint64_t seed, double init_gain = 1.0);
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void collect_params(std::vector<Param*>& out) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  int in_, out_;
  Param w_, b_;  // w stored (out, in)
  Tensor x_;
};

// ===== activations =====

class LeakyReLU : public Module {
 public:
  LeakyReLU(std::string name, float slope = 0.2f) : name_(std::move(name)), slope_(slope) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  float slope_;
  Tensor x_;
};

class Tanh : public Module {
 public:
  explicit Tanh(std::string name) : name_(std::move(name)) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  Tensor y_;
};

class Sigmoid : public Module {
 public:
  explicit Sigmoid(std::string name) : name_(std::move(name)) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  Tensor y_;
};

// ===== resampling =====

// 2x2 spatial mean pool. Accepts (N,C,H,W) or (N,C,T,H,W); the temporal
// axis is never pooled. H and W must be even.
class AvgPoolSpatial : public Module {
 public:
  explicit AvgPoolSpatial(std::string name) : name_(std::move(name)) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  Shape in_shape_;
};

// 2x2 spatial max pool, (N,C,H,W) only.
class MaxPool2d : public Module {
 public:
  explicit MaxPool2d(std::string name) : name_(std::move(name)) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  Shape in_shape_;
  std::vector<int64_t> argmax_;
};

// Nearest-neighbour 2x spatial upsample, (N,C,H,W) or (N,C,T,H,W).
class NNUpsampleSpatial : public Module {
 public:
  explicit NNUpsampleSpatial(std::string name) : name_(std::move(name)) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
};

// ===== normalization =====

// Per-position feature normalization across channels:
// y_c = x_c / sqrt(mean_c x_c^2 + eps).
class PixelNorm : public Module {
 public:
  explicit PixelNorm(std::string name, float eps = 1e-8f) : name_(std::move(name)), eps_(eps) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  float eps_;
  Tensor x_;
};

// ===== reductions =====

// (N, C, H, W) -> (N, 1): mean over all non-batch axes. Final stage of the
// patch critics, so they accept any spatial size.
class MeanReduce : public Module {
 public:
  explicit MeanReduce(std::string name) : name_(std::move(name)) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  Shape in_shape_;
};

// ===== composites =====

class Sequential : public Module {
 public:
  explicit Sequential(std::string name) : name_(std::move(name)) {}
  void add(ModulePtr m) { children_.push_back(std::move(m)); }
  size_t size() const { return children_.size(); }
  Module& child(size_t i) { return *children_[i]; }

  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void collect_params(std::vector<Param*>& out) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  std::vector<ModulePtr> children_;
};

// y = x + inner(x)
class ResidualBlock : public Module {
 public:
  ResidualBlock(std::string name, ModulePtr inner)
      : name_(std::move(name)), inner_(std::move(inner)) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void collect_params(std::vector<Param*>& out) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }

 private:
  std::string name_;
  ModulePtr inner_;
};

// y = clamp01(x + inner(x)); the whole-image residual path of the deblur
// generator. Gradients vanish where the clamp saturates.
class GlobalPixelResidual : public Module {
 public:
  GlobalPixelResidual(std::string name, ModulePtr inner)
      : name_(std::move(name)), inner_(std::move(inner)) {}
  Tensor forward(const Tensor& x) override;
  Tensor backward(const Tensor& dy, bool accumulate_param_grads) override;
  void collect_params(std::vector<Param*>& out) override;
  void describe(std::vector<LayerInfo>& out) const override;
  const std::string& name() const override { return name_; }
  Module& inner() { return *inner_; }

 private:
  std::string name_;
  ModulePtr inner_;
  Tensor pre_;
};

// Small helpers used when a forward pass is wired together manually.
Tensor avgpool_spatial2(const Tensor& x);
Tensor avgpool_spatial2_backward(const Tensor& dy, const Shape& in_shape);
Tensor nn_upsample_spatial2(const Tensor& x);
Tensor nn_upsample_spatial2_backward(const Tensor& dy);

}  // namespace framecast::nn
