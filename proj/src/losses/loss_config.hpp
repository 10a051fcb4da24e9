#pragma once

#include "losses/feature_extractor.hpp"

namespace framecast::losses {

enum class AdvKind {
  minimax,
  wasserstein_gp,
};

// Adversarial-plus-content objective shared by the prediction and
// enhancement trainers: total = adversarial + lambda * content.
struct LossConfig {
  AdvKind kind = AdvKind::wasserstein_gp;
  double lambda = 50.0;
  double gp_weight = 10.0;
  FeatureExtractorSpec extractor;

  void validate() const;
};

AdvKind adv_kind_from_string(const std::string& s);
std::string to_string(AdvKind kind);

}  // namespace framecast::losses
