#pragma once

namespace bessim {

/// Parse command-line arguments and dispatch to the matching command
/// backend. On success the paths of all written artifacts go to stdout,
/// one per line, and the return value is 0. Failures print a single
/// machine-readable JSON object to stderr and return 2 when a referenced
/// input file is missing, 1 for every other error.
int cli_main(int argc, const char* const* argv);

} // namespace bessim
