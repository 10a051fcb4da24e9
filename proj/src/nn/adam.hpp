#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nn/module.hpp"

namespace framecast::nn {

// ADAM with first/second moment state keyed by parameter name, so state
// survives progressive growth (new parameters simply start fresh moments)
// and round-trips through checkpoints.
class Adam {
 public:
  explicit Adam(double beta1, double beta2 = 0.999, double eps = 1e-8)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const std::vector<Param*>& params, double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (Param* p : params) {
      Moments& mo = state_[p->name];
      if (mo.m.v.empty()) {
        mo.m = Tensor::zeros(p->value.shape);
        mo.v = Tensor::zeros(p->value.shape);
      }
      const float b1 = static_cast<float>(beta1_), b2 = static_cast<float>(beta2_);
      for (size_t i = 0; i < p->value.v.size(); ++i) {
        const float g = p->grad.v[i];
        mo.m.v[i] = b1 * mo.m.v[i] + (1.0f - b1) * g;
        mo.v.v[i] = b2 * mo.v.v[i] + (1.0f - b2) * g * g;
        const double mhat = mo.m.v[i] / bc1;
        const double vhat = mo.v.v[i] / bc2;
        p->value.v[i] -= static_cast<float>(lr * mhat / (std::sqrt(vhat) + eps_));
      }
    }
  }

  int64_t step_count() const { return t_; }
  double beta1() const { return beta1_; }

  struct Moments {
    Tensor m, v;
  };

  // Exposed for checkpointing.
  std::map<std::string, Moments>& state() { return state_; }
  const std::map<std::string, Moments>& state() const { return state_; }
  void set_step_count(int64_t t) { t_ = t; }

 private:
  double beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::map<std::string, Moments> state_;
};

}  // namespace framecast::nn
