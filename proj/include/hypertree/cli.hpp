#pragma once

// The `hwq` command-line driver.

#include <iosfwd>
#include <string>
#include <vector>

namespace hypertree {

enum ExitStatus : int { kOk = 0, kNegative = 1, kUsage = 2, kInternal = 3 };

/// Runs one command; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hypertree
