#include "losses/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/rng.hpp"
#include "kern/kernels.hpp"

namespace framecast::losses {

namespace {

double mean_log_clamped(const std::vector<double>& probs, bool one_minus) {
  double acc = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("minimax loss: inputs must be probabilities in [0,1]");
    double q = one_minus ? 1.0 - p : p;
    q = std::clamp(q, kProbEps, 1.0 - kProbEps);
    acc += std::log(q);
  }
  return acc / static_cast<double>(probs.size());
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

double minimax_d_loss(const std::vector<double>& d_real, const std::vector<double>& d_fake) {
  if (d_real.empty() || d_fake.empty())
    throw std::invalid_argument("minimax_d_loss: empty batch");
  return -(mean_log_clamped(d_real, false) + mean_log_clamped(d_fake, true));
}

double minimax_g_loss(const std::vector<double>& d_fake) {
  if (d_fake.empty()) throw std::invalid_argument("minimax_g_loss: empty batch");
  return -mean_log_clamped(d_fake, false);
}

double gradient_penalty(ICritic& critic, const nn::Tensor& real, const nn::Tensor& fake,
                        uint64_t seed, nn::Tensor* mixed_out, nn::Tensor* grads_out) {
  if (real.shape != fake.shape)
    throw std::invalid_argument("gradient_penalty: real/fake shape mismatch");
  if (real.shape.rank < 2 || real.shape[0] < 1)
    throw std::invalid_argument("gradient_penalty: expected a non-empty batch");

  const int n = real.shape[0];
  const size_t stride = static_cast<size_t>(real.numel() / n);

  Rng rng = Rng::derived(seed, "gp_mix");
  nn::Tensor mixed(real.shape);
  for (int i = 0; i < n; ++i) {
    const float eps = static_cast<float>(rng.uniform());
    const float* rp = real.data() + i * stride;
    const float* fp = fake.data() + i * stride;
    float* mp = mixed.data() + i * stride;
    for (size_t q = 0; q < stride; ++q) mp[q] = eps * rp[q] + (1.0f - eps) * fp[q];
  }

  CriticEval eval = critic.score_with_input_grad(mixed);
  if (eval.input_grads.shape != real.shape)
    throw std::invalid_argument("gradient_penalty: critic returned wrong gradient shape");

  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(eval.scores[static_cast<size_t>(i)]))
      throw NumericalError("gradient_penalty: non-finite critic score");
    const double nsq = kern::sumsq(eval.input_grads.data() + i * stride, stride);
    if (!std::isfinite(nsq)) throw NumericalError("gradient_penalty: non-finite gradient");
    const double d = std::sqrt(nsq) - 1.0;
    acc += d * d;
  }
  if (mixed_out) *mixed_out = std::move(mixed);
  if (grads_out) *grads_out = std::move(eval.input_grads);
  return acc / static_cast<double>(n);
}

namespace {

// Central-difference Hessian-vector product for the penalty's parameter
// gradient: with v_n the upstream gradient into the critic's input gradient
// g_n, the contribution is roughly
//   sum_n ||v_n|| * (grad_theta D(x_n + h u_n) - grad_theta D(x_n - h u_n)) / (2h)
// with u_n = v_n / ||v_n||. Inputs live in [0, 1], so a fixed h is a stable
// fraction of the data range.
void accumulate_gp_param_grads(ITrainableCritic& critic, const nn::Tensor& mixed,
                               const nn::Tensor& grads, double gp_weight) {
  const int n = mixed.shape[0];
  const size_t per = mixed.v.size() / static_cast<size_t>(n);
  const double h = 1e-2;
  nn::Tensor xp = mixed, xm = mixed;
  std::vector<double> vnorm(static_cast<size_t>(n), 0.0);
  bool any = false;
  for (int i = 0; i < n; ++i) {
    const float* g = grads.data() + i * per;
    const double gn = std::sqrt(kern::sumsq(g, per));
    if (gn <= 0.0) continue;  // penalty subgradient taken as zero at g = 0
    const double coef = gp_weight * 2.0 / n * (gn - 1.0);
    if (coef == 0.0) continue;
    any = true;
    vnorm[static_cast<size_t>(i)] = std::abs(coef);
    const double dir = (coef > 0.0 ? h : -h) / gn;
    float* pp = xp.data() + i * per;
    float* pm = xm.data() + i * per;
    for (size_t q = 0; q < per; ++q) {
      const float step = static_cast<float>(dir * g[q]);
      pp[q] += step;
      pm[q] -= step;
    }
  }
  if (!any) return;
  std::vector<double> dplus(static_cast<size_t>(n)), dminus(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    dplus[static_cast<size_t>(i)] = vnorm[static_cast<size_t>(i)] / (2.0 * h);
    dminus[static_cast<size_t>(i)] = -dplus[static_cast<size_t>(i)];
  }
  critic.pass(xp, dplus, true, nullptr);
  critic.pass(xm, dminus, true, nullptr);
}

}  // namespace

double wgan_critic_grads(ITrainableCritic& critic, const nn::Tensor& real, const nn::Tensor& fake,
                         double gp_weight, uint64_t mix_seed) {
  if (real.shape != fake.shape)
    throw std::invalid_argument("wgan_critic_grads: real/fake shape mismatch");
  if (gp_weight < 0.0) throw std::invalid_argument("wgan_critic_grads: gp_weight must be >= 0");
  const int n = real.shape[0];
  const double inv = 1.0 / n;
  const std::vector<double> real_scores =
      critic.pass(real, std::vector<double>(static_cast<size_t>(n), -inv), true, nullptr);
  const std::vector<double> fake_scores =
      critic.pass(fake, std::vector<double>(static_cast<size_t>(n), inv), true, nullptr);

  nn::Tensor mixed, mixed_grads;
  const double gp = gradient_penalty(critic, real, fake, mix_seed, &mixed, &mixed_grads);
  if (gp_weight > 0.0) accumulate_gp_param_grads(critic, mixed, mixed_grads, gp_weight);

  return wgan_d_loss(real_scores, fake_scores, gp, gp_weight);
}

double wgan_d_loss(const std::vector<double>& real_scores, const std::vector<double>& fake_scores,
                   double gp_value, double gp_weight) {
  if (real_scores.empty() || fake_scores.empty())
    throw std::invalid_argument("wgan_d_loss: empty batch");
  if (gp_weight < 0.0) throw std::invalid_argument("wgan_d_loss: gp_weight must be >= 0");
  return mean_of(fake_scores) - mean_of(real_scores) + gp_weight * gp_value;
}

double wgan_g_loss(const std::vector<double>& fake_scores) {
  if (fake_scores.empty()) throw std::invalid_argument("wgan_g_loss: empty batch");
  return -mean_of(fake_scores);
}

double combined_loss(double adversarial, double content, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("combined_loss: lambda must be >= 0");
  return adversarial + lambda * content;
}

}  // namespace framecast::losses
