#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hilfer::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_usage = 64;

/// Runs one subcommand. args[0] is the program name, args[1] the subcommand.
/// CSV goes to --out (or run.output in the config) and otherwise to `out`; the one-line
/// summary goes to `out`, or to `err` when the CSV itself is written to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Usage text listing the subcommands.
std::string usage();

} // namespace hilfer::cli
