#pragma once

#include <ostream>

namespace pagets::cli {

/// Runs one command line. Data goes to `out`, diagnostics to `err`.
/// Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pagets::cli
