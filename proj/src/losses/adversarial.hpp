#pragma once

#include <cstdint>
#include <vector>

#include "nn/tensor.hpp"

namespace framecast::losses {

// Probabilities are clamped to [kProbEps, 1 - kProbEps] before any log, so
// saturated discriminators yield large finite losses instead of infinities.
constexpr double kProbEps = 1e-7;

// Two-player minimax objective, discriminator side:
//   -(mean log D(real) + mean log(1 - D(fake))).
// Inputs are probabilities in [0, 1]; both batches must be non-empty.
double minimax_d_loss(const std::vector<double>& d_real, const std::vector<double>& d_fake);

// Non-saturating generator objective: -mean log D(fake).
double minimax_g_loss(const std::vector<double>& d_fake);

// Critic interface for the gradient penalty. Implementations run their
// network forward on x and backpropagate a unit gradient per sample to the
// input, leaving parameter gradients untouched.
struct CriticEval {
  std::vector<double> scores;  // one per sample
  nn::Tensor input_grads;      // same shape as the input batch
};

class ICritic {
 public:
  virtual ~ICritic() = default;
  virtual std::vector<double> score(const nn::Tensor& x) = 0;
  virtual CriticEval score_with_input_grad(const nn::Tensor& x) = 0;
};

// Two-sided penalty mean((||grad critic(mix)||_2 - 1)^2) on per-sample
// convex mixes of real and fake, with the mixing coefficients drawn from the
// seed. Optional out-parameters expose the mixed batch and the gradients so
// training can reuse them. Throws NumericalError on non-finite scores or
// gradients.
double gradient_penalty(ICritic& critic, const nn::Tensor& real, const nn::Tensor& fake,
                        uint64_t seed, nn::Tensor* mixed_out = nullptr,
                        nn::Tensor* grads_out = nullptr);

// Critic that can also accumulate its own parameter gradients: one call runs
// the network forward on x and backpropagates the given per-sample score
// gradients, adding to parameter grads when accumulate_param_grads is set
// and optionally reporting the input gradient.
class ITrainableCritic : public ICritic {
 public:
  virtual std::vector<double> pass(const nn::Tensor& x, const std::vector<double>& dscore,
                                   bool accumulate_param_grads, nn::Tensor* dx_out) = 0;

  CriticEval score_with_input_grad(const nn::Tensor& x) final {
    CriticEval ev;
    ev.scores = pass(x, std::vector<double>(static_cast<size_t>(x.shape[0]), 1.0), false,
                     &ev.input_grads);
    return ev;
  }
};

// Gradient work of one penalized Wasserstein critic update,
//   loss = mean(fake) - mean(real) + gp_weight * GP,
// accumulated into the critic's parameter gradients (zero them first). The
// penalty's parameter gradient needs d/dtheta of v . grad_x critic(mix),
// a Hessian-vector product; it is formed by central differences, two extra
// critic passes at inputs nudged along v that backpropagate +-||v|| / (2h).
// Returns the loss value.
double wgan_critic_grads(ITrainableCritic& critic, const nn::Tensor& real, const nn::Tensor& fake,
                         double gp_weight, uint64_t mix_seed);

// Wasserstein critic loss with the penalty folded in:
//   mean(fake) - mean(real) + gp_weight * gp_value.
double wgan_d_loss(const std::vector<double>& real_scores, const std::vector<double>& fake_scores,
                   double gp_value, double gp_weight);

// Wasserstein generator loss: -mean(fake).
double wgan_g_loss(const std::vector<double>& fake_scores);

// Weighted total: adversarial + lambda * content. lambda must be >= 0.
double combined_loss(double adversarial, double content, double lambda);

}  // namespace framecast::losses
