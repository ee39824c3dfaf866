#pragma once

#include <iosfwd>

namespace mwvc {

// Entry point behind the mwvc binary; takes explicit streams so tests can
// drive it in-process. Exit codes:
//   0  success
//   1  verification failure (failed check, replay divergence, report mismatch)
//   2  usage or configuration error
//   3  missing or unwritable file
//   4  malformed file content
//   5  simulation invariant violation
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mwvc
