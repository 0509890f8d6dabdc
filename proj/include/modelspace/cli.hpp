#pragma once

// Command-line front end: gen, repair, run, report, validate.

#include <iosfwd>

namespace modelspace {

/// Exit status: 0 success, 1 instance-level error, 2 usage error. Output
/// files are written atomically.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace modelspace
