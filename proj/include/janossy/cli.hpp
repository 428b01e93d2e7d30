#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace janossy::cli {

/// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;  // numerical failure or threshold exceeded
inline constexpr int kExitConfig = 2;     // invalid flags or values

/// Inclusive grid "start:stop:step" or a single number. Throws
/// std::invalid_argument on malformed input, step <= 0 or an empty grid.
std::vector<double> parse_grid(const std::string& spec);

/// Decimal text with 17 significant digits; round-trips through strtod.
std::string format_number(double value);

/// Runs the command line `args` (without the program name). Data goes to
/// `out` unless --output names a file; diagnostics and progress go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace janossy::cli
