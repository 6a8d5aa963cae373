#pragma once

#include <ostream>

namespace edmol::cli {

// Runs one command line. Returns the process exit code: 0 success, 2 usage
// or input error, 3 internal error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace edmol::cli
