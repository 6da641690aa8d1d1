#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankagree {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInput = 2, kExitDegenerate = 3 };

/// Runs one subcommand (agree, align, pca, flops, simulate, report). Artifacts
/// go to files named by the flags, or to `out` when a single-artifact command
/// has no --out. Failures print one line `rankagree: error[<kind>]: <reason>`
/// to `err` and write nothing.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankagree
