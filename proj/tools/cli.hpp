#pragma once

#include <iosfwd>

namespace freshfinger {

/// Entry point of the freshfinger command. Returns the process exit code:
/// 0 success, 1 usage error, 2 invariant violation, 3 I/O error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace freshfinger
