#pragma once

#include <ostream>

namespace charp::cli {

// Exit codes: 0 success (Zero verdict for iszero, all checks passed for
// verify), 1 failed check or computation refused, 2 usage or parse error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace charp::cli
