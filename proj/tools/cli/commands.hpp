#pragma once

// The `gridflex` command line: run, compare, payback and validate.

#include <iosfwd>
#include <string>
#include <vector>

namespace gridflex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

// Parses `args` (without the program name) and runs the chosen subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace gridflex::cli
