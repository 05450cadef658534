#pragma once

#include <iosfwd>

namespace sbf::cli {

/// Entry point behind the `sbf` executable. Returns the process exit status;
/// diagnostics go to err as a single line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sbf::cli
