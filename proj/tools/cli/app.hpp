#pragma once

#include <iosfwd>

namespace fbc::cli {

enum ExitCode : int {
  kOk = 0,
  kParseError = 2,
  kComputeError = 3,
  kVerifyFailed = 4,
};

/// Entry point of the `fbc` tool; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbc::cli
