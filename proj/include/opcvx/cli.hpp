// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opcvx {

enum ExitCode : int { kExitPass = 0, kExitViolation = 1, kExitUsage = 2 };

/// Command-line entry point: certify, crosscheck, eval, suite.
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opcvx
