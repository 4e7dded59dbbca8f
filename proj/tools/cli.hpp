#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace altchain::cli {

enum ExitCode : int {
  kOk = 0,
  kFail = 1,
  kParseError = 2,
  kPrecondition = 3,
  kInapplicable = 4,
};

/// Runs one command line. args[0] is the program name. Machine-readable
/// output goes to out, diagnostics and the human summary to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace altchain::cli
