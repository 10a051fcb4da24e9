#include "losses/loss_config.hpp"

#include "core/errors.hpp"

namespace framecast::losses {

void LossConfig::validate() const {
  if (lambda < 0.0) throw ConfigError("loss lambda must be >= 0");
  if (gp_weight < 0.0) throw ConfigError("gradient penalty weight must be >= 0");
}

AdvKind adv_kind_from_string(const std::string& s) {
  if (s == "minimax") return AdvKind::minimax;
  if (s == "wasserstein_gp") return AdvKind::wasserstein_gp;
  throw ConfigError("unknown adversarial loss kind: " + s);
}

std::string to_string(AdvKind kind) {
  return kind == AdvKind::minimax ? "minimax" : "wasserstein_gp";
}

}  // namespace framecast::losses
