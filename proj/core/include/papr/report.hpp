// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "papr/flops.hpp"

namespace papr {

/// Aligned plain-text summary. Per-block entries are folded by layer
/// type (e.g. all "blockN.qkv" rows become one "qkv" row).
std::string format_report_table(const FlopReport& report);

/// Line-oriented `key=value` records, one entry per counted layer, in a
/// fixed order so two reports can be diffed line by line.
std::string format_report_records(const FlopReport& report);

}  // namespace papr
