#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fermimap::cli {

// Runs one command-line invocation. `args` excludes the program name; command
// output goes to `out`, diagnostics and timings to `err`. Returns the process
// exit code: 0 success, 2 input/parse error, 3 infeasible constraints,
// 4 numeric validation failure, 1 anything else.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

// argv wrapper around the vector overload (used by the executable).
int run(int argc, const char* const* argv);

// Floating-point rendering used in command output and CSV files (12
// significant digits).
std::string format_float(double value);

}  // namespace fermimap::cli
