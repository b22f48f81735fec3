#pragma once

#include <iosfwd>

namespace dyadic {

// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 numeric/internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dyadic
