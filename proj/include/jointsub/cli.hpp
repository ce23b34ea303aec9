#pragma once

#include <iosfwd>

namespace jointsub {

/// Exit codes: 0 success, 1 input error, 2 numerical failure.
int cli_main(int argc, char** argv);

/// Invariant checks at tiny dimensions; prints one line per check.
bool run_selftest(std::ostream& log);

}  // namespace jointsub
