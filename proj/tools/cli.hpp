#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kartel::cli {

enum ExitCode : int { kOk = 0, kUsageError = 1, kDataError = 2 };

/// Runs one `kartel <subcommand> ...` invocation. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kartel::cli
