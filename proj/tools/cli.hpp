#pragma once

#include <ostream>

namespace beam::cli {

enum ExitCode : int {
    ok = 0,
    internal = 1,
    usage = 2,
    io = 3,
    budget_exhausted = 4,
    invalid_input = 5,
    over_constrained = 6,
    file_format = 7,
    conflict = 8,
};

/// Entry point behind the `beam` binary; output goes to the given streams so
/// tests can drive it in-process. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace beam::cli
