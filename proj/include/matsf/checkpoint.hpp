#pragma once

// Checkpoint container: a magic/version line followed by one JSON document
// holding the architecture, every parameter tensor, and the fitted pipeline
// (feature order, vocabularies, scaler) needed to de-normalize forecasts.
//
//   MATSF-CHECKPOINT 1
//   {"system": ..., "forecasters": [...], "discriminator": ..., "pipeline": ...}

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matsf/data.hpp"
#include "matsf/models.hpp"

namespace matsf {

inline constexpr std::string_view kCheckpointMagic = "MATSF-CHECKPOINT";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  std::string system;
  std::vector<ForecasterModel> forecasters;
  std::optional<DiscriminatorModel> discriminator;
  PipelineMeta pipeline;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace matsf
