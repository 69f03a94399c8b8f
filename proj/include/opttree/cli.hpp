#pragma once

namespace opttree {

// Full command-line front end. Parses argv, runs the requested subcommand,
// writes the report to stdout and diagnostics to stderr. Returns the process
// exit code: 0 success, 2 bad input or bad usage, 3 time limit hit, 4
// internal invariant violation.
int run_cli(int argc, const char* const* argv);

}  // namespace opttree
