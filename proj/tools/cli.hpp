// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace papr::cli {

/// Exit codes: 0 success, 1 internal error, 2 usage or validation error.
enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2 };

/// Entry point shared by the `papr` binary and the tests. `args` excludes
/// the program name. Data goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace papr::cli
