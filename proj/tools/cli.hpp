#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scml::cli {

/// Stable process exit codes.
enum ExitCode : int {
    ok = 0,
    io_error = 1,
    invalid_config = 2,
};

/// Entry point shared by the executable and the tests. Subcommands: embed, metrics, synth.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scml::cli
