#pragma once

#include "augcast/net.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace augcast {

inline constexpr int kCheckpointVersion = 1;

/// JSON checkpoint: layer shapes, flags, hyperparameters and float64 parameters.
/// Doubles are written in shortest round-trip form, so load(save(net)) is bit-identical.
std::string checkpoint_json(const Network& net);
Network network_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Network& net);
Network load_checkpoint(const std::filesystem::path& path);

std::string hyperparameters_json(const Hyperparameters& hp);
Hyperparameters hyperparameters_from_json(const std::string& text);
Hyperparameters load_hyperparameters(const std::filesystem::path& path);

}  // namespace augcast
