#pragma once

#include <ostream>

namespace rsca::cli {

/// Parses argv and dispatches to a subcommand. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rsca::cli
