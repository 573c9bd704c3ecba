#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace limitalg::cli {

/// Exit codes: 0 success or positive verdict, 1 negative verdict, 2 input error.
enum ExitCode { kSuccess = 0, kNegative = 1, kInputError = 2 };

/// Runs one command; args excludes the program name. The JSON report goes to
/// `out` (or the --output file), diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace limitalg::cli
