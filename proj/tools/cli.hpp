#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chromnet::cli {

enum ExitCode : int {
    ok = 0,
    usage = 2,
    data_error = 3,
    solver_budget = 4,
    numeric = 5,
};

/// Runs one `chromnet` invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chromnet::cli
