#pragma once

#include <string>
#include <vector>

namespace clusterface {

/// Entry point behind the command-line tool, exposed so tests can drive the
/// full pipeline in-process. `args` excludes the program name. Returns the
/// process exit status: 0 success, 1 validation/usage error, 2 I/O error.
int run_command(const std::vector<std::string>& args);

/// argv-style overload (argv[0] is the program name).
int run_command(int argc, const char* const* argv);

}  // namespace clusterface
