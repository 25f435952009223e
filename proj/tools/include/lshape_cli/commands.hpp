#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lshape::cli {

/// Runs the command line; reports go to `out`, diagnostics to `err`.
/// Returns 0 when every assertion passed, 1 on an assertion failure and 2 on
/// usage, parse or resource errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lshape::cli
