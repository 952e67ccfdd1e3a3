#pragma once

#include <iosfwd>

namespace paternalism {

// Runs the command line; returns 0 on success, 1 on a domain or numerical
// error, 2 on a usage error. Diagnostics go to `err`, results to `out` unless
// an output path is given.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

const char* version();

}  // namespace paternalism
