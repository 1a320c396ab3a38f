#pragma once

#include <memory>
#include <optional>
#include <string>

#include "mgp/train.hpp"

namespace mgp {

inline constexpr int kCheckpointFormatVersion = 1;

/// Self-describing JSON container: model kind, named parameter arrays
/// (shape + row-major 64-bit values), config block, standardization
/// record, and the training seed.
void save_checkpoint(const std::string& path, const Model& model,
                     const TrainConfig& cfg,
                     const std::optional<Standardizer>& standardizer);

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  TrainConfig config;
  std::optional<Standardizer> standardizer;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

/// FNV-1a hash of a run manifest, stamped onto every artifact file.
std::string config_hash(const std::string& canonical_json);

std::string train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const std::string& text);

}  // namespace mgp
