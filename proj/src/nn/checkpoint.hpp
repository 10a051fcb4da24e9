#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nn/adam.hpp"
#include "nn/module.hpp"

namespace framecast::nn {

// Checkpoint container: magic, JSON header (kind, caller metadata, tensor
// directory), then raw float32 little-endian blobs in directory order.
// Weights round-trip bitwise.

struct CheckpointData {
  std::string kind;  // "predictor" or "enhancer"
  nlohmann::json meta;
  std::vector<std::pair<std::string, Tensor>> params;
  int64_t adam_t = 0;
  struct AdamEntry {
    std::string name;
    Tensor m, v;
  };
  std::vector<AdamEntry> adam;
};

void save_checkpoint(const CheckpointData& data, const std::string& path);
CheckpointData load_checkpoint(const std::string& path);

// Reads just kind and meta without validating blob sizes beyond the header.
std::pair<std::string, nlohmann::json> peek_checkpoint(const std::string& path);

CheckpointData snapshot_checkpoint(const std::string& kind, const nlohmann::json& meta,
                                   const std::vector<Param*>& params, const Adam* adam);

// Copies stored tensors into matching live params by name. Unmatched stored
// tensors are an error unless allow_extra; unmatched live params are an error
// unless allow_missing (progressive growth relies on allow_missing).
void restore_params(const CheckpointData& data, const std::vector<Param*>& params,
                    bool allow_missing, bool allow_extra);

void restore_adam(const CheckpointData& data, Adam& adam);

}  // namespace framecast::nn
