#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include "dlad/model.hpp"

namespace dlad {

// Versioned little-endian binary container for (ModelSpec, ModelParams).
// Doubles are stored as raw IEEE-754 bits, so round trips are bit-exact.
void save_checkpoint(const std::filesystem::path& path, const ModelSpec& spec,
                     const ModelParams& params);

std::pair<ModelSpec, ModelParams> load_checkpoint(
    const std::filesystem::path& path);

// FNV-1a over the parameter bytes in layer order; used by the frozen-model
// checks and the run manifest.
std::uint64_t params_hash(const ModelParams& params);

// FNV-1a over a file's bytes.
std::uint64_t file_hash(const std::filesystem::path& path);

}  // namespace dlad
