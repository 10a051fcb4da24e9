#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nn/tensor.hpp"

namespace framecast::nn {

// Learnable tensor with its gradient accumulator. Names are full paths
// ("g.enc_16.conv.w") and double as serialization keys and init seeds.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
};

struct LayerInfo {
  std::string name;
  std::string kind;
  std::string detail;
};

// Single-input single-output differentiable block. forward() caches whatever
// backward() needs; backward() consumes the gradient w.r.t. the output and
// returns the gradient w.r.t. the input. Parameter gradients accumulate into
// Param::grad only when accumulate_param_grads is set, so input-gradient
// probes (gradient penalty) do not pollute training state.
//
// A module owns exactly one activation cache. Callers that run two forward
// passes through shared blocks must re-run forward before the matching
// backward.
class Module {
 public:
  virtual ~Module() = default;

  virtual Tensor forward(const Tensor& x) = 0;
  virtual Tensor backward(const Tensor& dy, bool accumulate_param_grads) = 0;

  virtual void collect_params(std::vector<Param*>&) {}
  virtual void describe(std::vector<LayerInfo>& out) const = 0;
  virtual const std::string& name() const = 0;

  void zero_grads() {
    std::vector<Param*> ps;
    collect_params(ps);
    for (Param* p : ps)
      for (float& g : p->grad.v) g = 0.0f;
  }
};

using ModulePtr = std::unique_ptr<Module>;

}  // namespace framecast::nn
