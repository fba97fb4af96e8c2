// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "papr/psm.hpp"

namespace papr::io {

/// Text record of a PruneMask:
///
///   # papr prune mask
///   grid = 14,14
///   z = 0.5
///   keep_count = 98
///   kept = 17,30,...
///
/// `kept` is in descending-significance order.
std::string format_mask_record(const PruneMask& mask);
PruneMask parse_mask_record(const std::string& text);

void write_mask_record(const std::filesystem::path& path, const PruneMask& mask);
PruneMask read_mask_record(const std::filesystem::path& path);

}  // namespace papr::io
