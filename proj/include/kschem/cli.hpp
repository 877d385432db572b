#pragma once

#include <iosfwd>

namespace kschem {

// Exit codes: 0 success, 2 usage or validation error, 3 numerical non-convergence.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kschem
