#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace holoq::cli {

enum ExitCode : int { exit_ok = 0, exit_io = 1, exit_validation = 2, exit_numerical = 3 };

// Entry point of the holoq command; args[0] is the program name.
// Diagnostics go to `err` as one JSON object per line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace holoq::cli
