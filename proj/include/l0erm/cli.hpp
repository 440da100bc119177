#pragma once

#include <iosfwd>

namespace l0erm {

/// Entry point of the `l0erm` command line tool. Returns 0 on success, 1 on a
/// usage error and 2 when the requested work fails.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace l0erm
