#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace specboot::cli {

/// Runs the command line `args` (without the program name). Primary output
/// goes to `out` unless --out names a file; diagnostics go to `err`.
/// Returns 0 on success, 1 for runtime failures and 2 for usage or config
/// errors.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace specboot::cli
