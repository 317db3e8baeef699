#pragma once

#include <iosfwd>

namespace dgmd {

/// Command-line driver: `run`, `convergence` and `check` subcommands on a TOML experiment.
/// Returns the process exit code; diagnostics go to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dgmd
