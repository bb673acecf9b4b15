#pragma once

#include <iosfwd>

namespace summon {

/// Exit codes of the summon command.
enum ExitCode : int {
  kExitOk = 0,          // success / classically possible
  kExitFailure = 1,     // verification failure or unexpected error
  kExitInvalid = 2,     // invalid task, parse error or bad usage
  kExitImpossible = 3,  // classically impossible
  kExitRefused = 4,     // quantum synthesis refused or unsupported
};

/// Entry point of the `summon` command line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace summon
