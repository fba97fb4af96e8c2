// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "papr/models.hpp"

namespace papr::io {

/// Name of the manifest inside a weights directory. Each line maps a
/// parameter name to a tensor file relative to the directory:
///
///   blocks.0.attn.qkv.weight = blocks.0.attn.qkv.weight.ptsr
inline constexpr const char* kManifestName = "manifest.txt";

/// Load every parameter `spec` needs; missing, unknown or mis-shaped
/// entries are errors.
ParameterSet load_weights(const std::filesystem::path& dir, const ModelSpec& spec);

/// Write one tensor file per parameter plus the manifest.
void save_weights(const std::filesystem::path& dir, const ParameterSet& params);

}  // namespace papr::io
